#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "sheetlab/parallel.hpp"
#include "sheetlab/potential.hpp"

using namespace sheetlab;

namespace {

struct WorkerGuard {
    ~WorkerGuard() { set_workers(0); }
};

DiscreteSet two_atoms(double gap) {
    DiscreteSet f;
    f.dim = 1;
    f.points = {{1.0}, {1.0 + gap}};
    return f;
}

}  // namespace

TEST_CASE("measures validate and round trip") {
    auto mu = DiscreteMeasure::uniform(make_interval(0.0, 1.0, 4));
    CHECK(mu.weights == std::vector<double>(4, 0.25));
    CHECK_NOTHROW(mu.validate());

    DiscreteMeasure bad = mu;
    bad.weights[0] = 0.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.weights = {0.25, 0.25};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    const std::string path = "test_potential_measure.csv";
    mu.to_csv(path);
    auto back = DiscreteMeasure::from_csv(path);
    CHECK(back.support.points == mu.support.points);
    CHECK(back.weights == mu.weights);
    std::remove(path.c_str());

    const auto h = mu.hash();
    CHECK(h == back.hash());
    DiscreteMeasure tweaked = mu;
    tweaked.weights = {0.3, 0.2, 0.25, 0.25};
    CHECK(tweaked.hash() != h);
}

TEST_CASE("kernel specs and diagonal terms") {
    auto k = KernelSpec::riesz(0.5);
    CHECK(k.eval(4.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(k.diagonal() == 0.0);
    CHECK(k.policy_name() == "exclude");
    CHECK_THROWS_AS(k.eval(0.0), std::invalid_argument);
    CHECK_THROWS_AS(KernelSpec::riesz(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(KernelSpec::riesz(0.5, DiagonalPolicy::cell_average, 0.0),
                    std::invalid_argument);

    // mean kernel over a cell: 2 h^-a / ((1-a)(2-a)) below a = 1
    auto ca = KernelSpec::riesz(0.5, DiagonalPolicy::cell_average, 0.5);
    CHECK(ca.diagonal() ==
          doctest::Approx(2.0 * std::pow(0.5, -0.5) / 0.75).epsilon(1e-14));
    CHECK(ca.policy_name() == "cell_average");
    // half-cell substitute at and above a = 1
    auto hot = KernelSpec::riesz(1.5, DiagonalPolicy::cell_average, 0.5);
    CHECK(hot.diagonal() == doctest::Approx(8.0).epsilon(1e-14));

    // generic radial kernels integrate the cell average numerically
    auto rad = KernelSpec::radial(
        [](double r) { return std::pow(r, -0.5); },
        DiagonalPolicy::cell_average, 0.5);
    CHECK(rad.diagonal() == doctest::Approx(ca.diagonal()).epsilon(0.001));
}

TEST_CASE("energy worked values") {
    auto mu = DiscreteMeasure::uniform(two_atoms(0.5));
    CHECK(energy(mu, KernelSpec::riesz(1.0)) ==
          doctest::Approx(1.0).epsilon(1e-14));

    // constant kernel c: energy = c (1 - sum w^2)
    auto five = DiscreteMeasure::uniform(make_interval(0.0, 1.0, 5));
    auto flat = KernelSpec::radial([](double) { return 2.0; });
    CHECK(energy(five, flat) == doctest::Approx(2.0 * 0.8).epsilon(1e-13));

    DiscreteMeasure dup;
    dup.support.dim = 1;
    dup.support.points = {{1.0}, {1.0}};
    dup.weights = {0.5, 0.5};
    CHECK_THROWS(energy(dup, KernelSpec::riesz(1.0)));
}

TEST_CASE("parallel energy is bit-identical to the serial reference") {
    WorkerGuard guard;
    auto mu = DiscreteMeasure::uniform(make_cantor(4, 0.3, 0.0, 1.0));
    auto k = KernelSpec::riesz(0.7, DiagonalPolicy::cell_average, 1e-3);
    const double serial = energy_serial(mu, k);
    for (int w : {1, 2, 3}) {
        set_workers(w);
        CHECK(energy(mu, k) == serial);
    }
}

TEST_CASE("uniform interval energy approaches the continuum value") {
    auto mu = DiscreteMeasure::uniform(make_interval(0.0, 1.0, 256));
    auto k = KernelSpec::riesz(0.5, DiagonalPolicy::cell_average, 1.0 / 256);
    CHECK(energy(mu, k) == doctest::Approx(8.0 / 3.0).epsilon(0.01));
}

TEST_CASE("two-atom minimization stalls at the constant-potential point") {
    auto res = capacity(two_atoms(1.0), KernelSpec::riesz(1.0));
    CHECK(res.converged);
    CHECK(res.iterations == 0);
    CHECK(res.energy == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(res.capacity == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(res.diagonal_policy == "exclude");
    CHECK(res.minimizer.weights == std::vector<double>{0.5, 0.5});
}

TEST_CASE("single atoms carry zero energy and infinite capacity") {
    DiscreteSet one;
    one.dim = 2;
    one.points = {{1.0, 1.0}};
    auto res = capacity(one, KernelSpec::riesz(0.5));
    CHECK(res.converged);
    CHECK(res.energy == 0.0);
    CHECK(std::isinf(res.capacity));
}

TEST_CASE("well-posed minimization on an asymmetric instance") {
    DiscreteSet f;
    f.dim = 1;
    f.points = {{0.0}, {0.1}, {0.35}, {0.7}, {0.8}, {1.0}};
    auto k = KernelSpec::riesz(0.5, DiagonalPolicy::cell_average, 0.05);
    FrankWolfeOptions opt;
    opt.tol = 1e-10;
    auto res = capacity(f, k, opt);
    CHECK(res.converged);
    CHECK(res.gap < 1e-10 * (1.0 + res.energy));
    CHECK(res.energy > 0.0);
    CHECK_NOTHROW(res.minimizer.validate());

    // below the uniform energy
    CHECK(res.energy <= energy(DiscreteMeasure::uniform(f), k) + 1e-12);

    // equilibrium property: the potential is constant on the support
    const auto& w = res.minimizer.weights;
    double pmin = std::numeric_limits<double>::infinity();
    double psup = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < f.size(); ++i) {
        double p = 0.0;
        for (std::size_t j = 0; j < f.size(); ++j) {
            if (i == j)
                p += w[j] * k.diagonal();
            else
                p += w[j] * k.eval(std::abs(f.points[i][0] - f.points[j][0]));
        }
        pmin = std::min(pmin, p);
        if (w[i] > 1e-10) psup = std::max(psup, p);
    }
    CHECK(psup - pmin <= 1e-5 * (1.0 + res.energy));
}

TEST_CASE("minimum does not depend on the starting point") {
    auto f = make_cantor(3, 0.3, 0.0, 1.0);
    auto k = KernelSpec::riesz(0.6, DiagonalPolicy::cell_average, 1e-2);
    FrankWolfeOptions a;
    a.tol = 1e-10;
    auto ra = capacity(f, k, a);

    FrankWolfeOptions b = a;
    std::mt19937_64 eng(19);
    std::uniform_real_distribution<double> uni(0.1, 1.0);
    b.start.resize(f.size());
    double s = 0.0;
    for (auto& x : b.start) s += (x = uni(eng));
    for (auto& x : b.start) x /= s;
    // exact renormalization to protect the simplex check
    double s2 = 0.0;
    for (double x : b.start) s2 += x;
    b.start.back() += 1.0 - s2;
    auto rb = capacity(f, k, b);

    CHECK(ra.converged);
    CHECK(rb.converged);
    CHECK(ra.energy == doctest::Approx(rb.energy).epsilon(1e-8));

    FrankWolfeOptions bad;
    bad.start = {0.5, 0.5};
    CHECK_THROWS_AS(capacity(f, k, bad), std::invalid_argument);
}

TEST_CASE("capacity grows with the set") {
    auto f = make_interval(0.0, 1.0, 16);
    DiscreteSet sub;
    sub.dim = 1;
    sub.points.assign(f.points.begin(), f.points.begin() + 8);

    auto k = KernelSpec::riesz(0.5, DiagonalPolicy::cell_average, 1.0 / 16);
    FrankWolfeOptions opt;
    opt.tol = 1e-9;
    auto big = capacity(f, k, opt);
    auto small = capacity(sub, k, opt);
    CHECK(big.converged);
    CHECK(small.converged);
    CHECK(small.capacity <= big.capacity + 1e-6 * (1.0 + big.capacity));
}

TEST_CASE("scale-function criterion integral") {
    auto one = [](double) { return 1.0; };
    // exponent N - d/2 - 1 = -1/2: integral 2
    auto conv = f_criterion_integral(one, 2, 3);
    CHECK(conv.finite);
    CHECK(conv.value == doctest::Approx(2.0).epsilon(0.01));
    // exponent 1/2: integral 2/3
    auto easy = f_criterion_integral(one, 2, 1);
    CHECK(easy.finite);
    CHECK(easy.value == doctest::Approx(2.0 / 3.0).epsilon(0.01));
    // exponent -1: log-divergent
    auto div = f_criterion_integral(one, 1, 2);
    CHECK_FALSE(div.finite);
}

TEST_CASE("frostman constant scans atoms and midpoints") {
    DiscreteMeasure mu;
    mu.support.dim = 1;
    mu.support.points = {{0.0}, {1.0}};
    mu.weights = {0.5, 0.5};
    CHECK(frostman_constant(mu, 1.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK_THROWS_AS(frostman_constant(mu, 0.0), std::invalid_argument);
}

TEST_CASE("box dimension of reference sets") {
    auto seg = box_dimension(make_interval(0.0, 1.0, 512),
                             {0.2, 0.1, 0.05, 0.025, 0.0125});
    CHECK(seg.dimension == doctest::Approx(1.0).epsilon(0.1));
    CHECK(seg.counts.size() == 5);

    const double third = 1.0 / 3.0;
    auto cant = box_dimension(
        make_cantor(6, third, 0.0, 1.0),
        {std::pow(third, 1), std::pow(third, 2), std::pow(third, 3),
         std::pow(third, 4), std::pow(third, 5)});
    CHECK(cant.dimension ==
          doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(0.03));
    CHECK(cant.residual < 0.02);

    auto prod = box_dimension(
        make_cantor_product(4, third, 0.0, 1.0),
        {std::pow(third, 1), std::pow(third, 2), std::pow(third, 3),
         std::pow(third, 4)});
    CHECK(prod.dimension ==
          doctest::Approx(2.0 * std::log(2.0) / std::log(3.0)).epsilon(0.03));

    CHECK_THROWS_AS(box_dimension(make_interval(0.0, 1.0, 8), {0.2, 0.1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        box_dimension(make_interval(0.0, 1.0, 8), {0.2, 0.1, 0.05}),
        std::invalid_argument);
}

TEST_CASE("reference set constructions") {
    auto iv = make_interval(0.0, 1.0, 2);
    CHECK(iv.points == std::vector<ParamPoint>{{0.25}, {0.75}});

    auto c1 = make_cantor(1, 1.0 / 3.0, 0.0, 1.0);
    REQUIRE(c1.size() == 2);
    CHECK(c1.points[0][0] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(c1.points[1][0] == doctest::Approx(5.0 / 6.0).epsilon(1e-14));

    auto c2 = make_cantor(2, 1.0 / 3.0, 1.0, 4.0);
    REQUIRE(c2.size() == 4);
    CHECK(c2.points[0][0] == doctest::Approx(1.0 + 3.0 / 18.0).epsilon(1e-14));

    auto p1 = make_cantor_product(1, 0.2, 0.0, 1.0);
    REQUIRE(p1.size() == 4);
    CHECK(p1.dim == 2);
    CHECK(p1.points[0][0] == doctest::Approx(0.1).epsilon(1e-14));

    auto cube = make_cube(GridSpec{1.0, 2.0, {3, 3}});
    CHECK(cube.size() == 9);
    CHECK(cube.points[4] == ParamPoint{1.5, 1.5});

    CHECK_THROWS_AS(make_cantor(1, 0.5, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_interval(1.0, 0.0, 4), std::invalid_argument);
}
