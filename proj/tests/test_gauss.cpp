#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sheetlab/gauss.hpp"

using namespace sheetlab;

TEST_CASE("sheet covariance worked values") {
    CHECK(sheet_cov({1.0, 2.0}, {3.0, 1.5}) == 1.5);
    CHECK(sheet_cov({2.0}, {5.0}) == 2.0);
    CHECK(sheet_cov({0.0, 7.0}, {3.0, 7.0}) == 0.0);
    CHECK_THROWS_AS(sheet_cov({1.0}, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(sheet_cov({-1.0}, {1.0}), std::invalid_argument);
}

TEST_CASE("incremental variance worked values and symmetry") {
    // prod u + prod v - 2 prod min
    CHECK(incremental_variance({1.0, 1.0}, {1.0, 2.0}) == 1.0);
    CHECK(incremental_variance({2.0, 3.0}, {2.0, 3.0}) == 0.0);
    CHECK(incremental_variance({1.0, 4.0}, {2.0, 1.0}) ==
          doctest::Approx(4.0 + 2.0 - 2.0).epsilon(1e-15));
    std::mt19937_64 eng(3);
    std::uniform_real_distribution<double> uni(0.5, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        ParamPoint u{uni(eng), uni(eng)};
        ParamPoint v{uni(eng), uni(eng)};
        CHECK(incremental_variance(u, v) == incremental_variance(v, u));
        CHECK(incremental_variance(u, v) >= 0.0);
    }
}

TEST_CASE("increment variance bracket") {
    auto br = increment_bounds({1.0, 1.0}, {1.0, 2.0}, 1.0, 2.0);
    CHECK(br.lower == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(br.upper == doctest::Approx(4.0).epsilon(1e-15));

    std::mt19937_64 eng(5);
    for (int n = 1; n <= 3; ++n) {
        const double a = 0.5, b = 2.0;
        std::uniform_real_distribution<double> uni(a, b);
        for (int trial = 0; trial < 300; ++trial) {
            ParamPoint u(n), v(n);
            for (int k = 0; k < n; ++k) {
                u[k] = uni(eng);
                v[k] = uni(eng);
            }
            const double var = incremental_variance(u, v);
            const auto bb = increment_bounds(u, v, a, b);
            CHECK(var >= bb.lower - bound_slack(var));
            CHECK(var <= bb.upper + bound_slack(var));
        }
    }
    CHECK_THROWS_AS(increment_bounds({0.1}, {0.2}, 0.5, 2.0),
                    std::invalid_argument);
}

TEST_CASE("linear combinations validate") {
    auto v = LinComb::value({1.0, 2.0});
    CHECK_NOTHROW(v.validate());
    auto inc = LinComb::increment({1.0}, {2.0});
    CHECK(inc.coeffs == std::vector<double>{1.0, -1.0});
    LinComb bad;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.points = {{1.0}, {1.0, 2.0}};
    bad.coeffs = {1.0, 1.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("covariance matrices") {
    std::vector<ParamPoint> pts{{1.0, 1.0}, {2.0, 1.0}, {1.5, 3.0}};
    auto k = cov_matrix(pts);
    CHECK(k.rows() == 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(k(i, j) == sheet_cov(pts[i], pts[j]));

    auto flat = cov_matrix(pts, [](const ParamPoint&, const ParamPoint&) {
        return 2.5;
    });
    CHECK(flat(0, 2) == 2.5);
}

TEST_CASE("conditional variance basics") {
    // unconditional
    CHECK(cond_var(LinComb::value({2.0, 3.0}), {}) == 6.0);
    // one-parameter Markov check: Var(X(2) | X(1)) = 2 - 1 = 1
    CHECK(cond_var(LinComb::value({2.0}), {{1.0}}) ==
          doctest::Approx(1.0).epsilon(1e-12));
    // interior point between two conditioners: (s2-t)(t-s1)/(s2-s1)
    CHECK(cond_var(LinComb::value({1.5}), {{1.0}, {2.0}}) ==
          doctest::Approx(0.25).epsilon(1e-10));

    CHECK_THROWS_AS(cond_var(LinComb::value({1.0}), {{1.0}, {1.0}}),
                    NearSingularError);
    CHECK_THROWS_AS(cond_var(LinComb::value({0.0, 1.0}), {{1.0, 1.0}}),
                    std::invalid_argument);
    // nearly coincident conditioners blow the condition number
    CHECK_THROWS_AS(cond_var(LinComb::value({2.0}), {{1.0}, {1.0 + 1e-15}}),
                    NearSingularError);
}

TEST_CASE("conditioning on more points never raises the variance") {
    std::mt19937_64 eng(17);
    std::uniform_real_distribution<double> uni(0.5, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        ParamPoint u{uni(eng), uni(eng)};
        std::vector<ParamPoint> small{{uni(eng), uni(eng)}};
        auto big = small;
        big.push_back({uni(eng), uni(eng)});
        double vs, vb;
        try {
            vs = cond_var(LinComb::value(u), small);
            vb = cond_var(LinComb::value(u), big);
        } catch (const NearSingularError&) {
            continue;
        }
        CHECK(vb <= vs + bound_slack(vs));
    }
}

TEST_CASE("path conditional variance closed forms") {
    // shared gap: (t - s) (gap - (t - s)) / gap
    CHECK(bm_cond_var_case2(0.5, 1.0, 2.0, 4.0) ==
          doctest::Approx(5.0 / 7.0).epsilon(1e-15));
    // interior: (s2-s)(s-s1)/(s2-s1) + (s4-t)(t-s3)/(s4-s3)
    CHECK(bm_cond_var_case1(0.0, 1.0, 2.0, 3.0, 4.0, 6.0) ==
          doctest::Approx(7.0 / 6.0).epsilon(1e-15));
    CHECK(bm_cond_var_case1(0.0, 1.0, 2.0, 3.0, 5.0, 7.0) ==
          doctest::Approx(1.5).epsilon(1e-15));

    // Schur cross-checks need strictly positive times
    {
        const double got = cond_var(LinComb::increment({2.0}, {1.0}),
                                    {{0.5}, {4.0}});
        CHECK(got == doctest::Approx(bm_cond_var_case2(0.5, 1.0, 2.0, 4.0))
                         .epsilon(1e-12));
    }
    {
        const double formula = bm_cond_var_case1(0.5, 1.0, 2.0, 3.0, 4.0, 6.0);
        CHECK(formula == doctest::Approx(1.0).epsilon(1e-15));
        const double got = cond_var(LinComb::increment({4.0}, {1.0}),
                                    {{0.5}, {2.0}, {3.0}, {6.0}});
        CHECK(got == doctest::Approx(formula).epsilon(1e-12));
    }

    std::mt19937_64 eng(23);
    std::uniform_real_distribution<double> uni(0.1, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        // strictly increasing positive times from stacked gaps
        double t[6];
        double acc = 0.0;
        for (double& x : t) {
            acc += uni(eng);
            x = acc;
        }
        const double formula = bm_cond_var_case1(t[0], t[1], t[2], t[3], t[4], t[5]);
        const double schur = cond_var(LinComb::increment({t[4]}, {t[1]}),
                                      {{t[0]}, {t[2]}, {t[3]}, {t[5]}});
        CHECK(schur == doctest::Approx(formula).epsilon(1e-9));

        const double f2 = bm_cond_var_case2(t[0], t[1], t[2], t[3]);
        const double s2 = cond_var(LinComb::increment({t[2]}, {t[1]}),
                                   {{t[0]}, {t[3]}});
        CHECK(s2 == doctest::Approx(f2).epsilon(1e-9));
    }
}

TEST_CASE("sectorial lower bounds dominate nothing they should not") {
    // definition check
    CHECK(lnd_lower_bound({2.0, 3.0}, {{1.0, 1.0}, {4.0, 5.0}}, 1.0) ==
          doctest::Approx(1.5).epsilon(1e-15));
    // increment variant worked value: bound 0.5 below true 2/3
    const double lb = lnd_increment_lower_bound({2.0}, {3.0}, {{1.0}, {4.0}}, 1.0);
    CHECK(lb == doctest::Approx(0.5).epsilon(1e-15));
    const double truth = cond_var(LinComb::increment({3.0}, {2.0}),
                                  {{1.0}, {4.0}});
    CHECK(truth == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(lb <= truth + bound_slack(truth));

    std::mt19937_64 eng(29);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(eng() % 2);
        const double a = 0.5;
        std::uniform_real_distribution<double> uni(a, 3.0);
        ParamPoint u(n), v(n);
        for (int k = 0; k < n; ++k) {
            u[k] = uni(eng);
            v[k] = uni(eng);
        }
        std::vector<ParamPoint> conds(1 + eng() % 3, ParamPoint(n));
        for (auto& t : conds)
            for (int k = 0; k < n; ++k) t[k] = uni(eng);
        try {
            const double var_u = cond_var(LinComb::value(u), conds);
            CHECK(var_u >= lnd_lower_bound(u, conds, a) - bound_slack(var_u));
            const double var_uv =
                cond_var(LinComb::increment(u, v), conds);
            CHECK(var_uv >= lnd_increment_lower_bound(u, v, conds, a) -
                                bound_slack(var_uv));
        } catch (const NearSingularError&) {
            continue;
        }
    }
}

TEST_CASE("determinant chains match the dense determinant") {
    // ordered path times: t1 (t2 - t1) (t3 - t2)
    std::vector<ParamPoint> path{{1.0}, {2.5}, {3.0}};
    CHECK(det_cov_chain(path) == doctest::Approx(1.0 * 1.5 * 0.5).epsilon(1e-12));

    std::mt19937_64 eng(31);
    std::uniform_real_distribution<double> uni(0.5, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<ParamPoint> pts;
        const int m = 2 + static_cast<int>(eng() % 3);
        for (int i = 0; i < m; ++i) pts.push_back({uni(eng), uni(eng)});
        double chain, direct;
        try {
            chain = det_cov_chain(pts);
            direct = det_cov_direct(pts);
        } catch (const NearSingularError&) {
            continue;
        }
        CHECK(chain == doctest::Approx(direct).epsilon(1e-8));
    }
}

TEST_CASE("block path sums") {
    SelfIntersectionSpec spec;
    spec.r = {1.0, 1.0};
    spec.blocks = {{1.0, 2.0}, {3.0, 4.0}};
    CHECK_NOTHROW(spec.validate());
    CHECK(si_cov(spec, {1.0, 3.0}, {2.0, 4.0}) == 7.0);

    SelfIntersectionSpec diff;
    diff.r = {1.0, -1.0};
    diff.blocks = {{0.5, 1.5}, {2.5, 3.5}};
    CHECK(si_cov(diff, {1.0, 2.6}, {1.0, 2.6}) ==
          doctest::Approx(1.0 - 1.0 - 1.0 + 2.6).epsilon(1e-14));

    SelfIntersectionSpec bad;
    bad.r = {1.0, 1.0};
    bad.blocks = {{1.0, 3.0}, {3.5, 4.0}};  // block longer than the gap
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    CHECK_THROWS_AS(si_cov(spec, {0.5, 3.0}, {1.0, 3.0}),
                    std::invalid_argument);

    auto k = si_kernel(spec);
    CHECK(k({1.5, 3.5}, {1.0, 3.0}) == si_cov(spec, {1.5, 3.5}, {1.0, 3.0}));
}

TEST_CASE("block path sectorial bound") {
    SelfIntersectionSpec spec;
    spec.r = {1.0, 1.0};
    spec.blocks = {{1.0, 2.0}, {3.0, 4.0}};
    CHECK(si_lnd_bound(spec, {1.5, 3.5}, {{1.0, 3.0}}) ==
          doctest::Approx(0.25).epsilon(1e-15));

    std::mt19937_64 eng(37);
    std::uniform_real_distribution<double> u1(1.0, 2.0), u2(3.0, 4.0);
    const auto kernel = si_kernel(spec);
    for (int trial = 0; trial < 100; ++trial) {
        ParamPoint u{u1(eng), u2(eng)};
        std::vector<ParamPoint> conds(1 + eng() % 2, ParamPoint(2));
        for (auto& t : conds) t = {u1(eng), u2(eng)};
        try {
            const double var = cond_var(LinComb::value(u), conds, kernel);
            CHECK(var >= si_lnd_bound(spec, u, conds) - bound_slack(var));
        } catch (const NearSingularError&) {
            continue;
        }
    }
}

TEST_CASE("exact Gaussian ball probabilities") {
    CHECK(centered_ball_prob(1.0, 1.0) ==
          doctest::Approx(std::erf(1.0 / std::sqrt(2.0))).epsilon(1e-15));
    CHECK(shifted_ball_prob(1.0, 0.0, 1.0) == centered_ball_prob(1.0, 1.0));
    CHECK(shifted_ball_prob(2.0, 1.5, 0.5) ==
          doctest::Approx(shifted_ball_prob(2.0, -1.5, 0.5)).epsilon(1e-15));
    CHECK(centered_ball_prob(1.0, 0.0) == 0.0);
    CHECK_THROWS_AS(centered_ball_prob(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("shift bound stays below the exact probability") {
    std::mt19937_64 eng(41);
    std::uniform_real_distribution<double> usig(0.5, 2.0), uni(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        const double sigma = usig(eng);
        const double alpha = 0.2 + uni(eng);
        const double beta = 0.2 + uni(eng);
        const double x = (2.0 * uni(eng) - 1.0) * alpha * sigma;
        const double eps = (0.01 + 2.0 * uni(eng)) * sigma;
        const double lb = gaussian_shift_bound(sigma, alpha, beta, x, eps);
        const double exact = shifted_ball_prob(sigma, x, eps);
        CHECK(lb <= exact + bound_slack(exact));
        CHECK(lb >= 0.0);
    }
    CHECK_THROWS_AS(gaussian_shift_bound(1.0, 0.5, 0.5, 0.9, 0.1),
                    std::invalid_argument);
}

TEST_CASE("finite-dimensional criterion integrand") {
    CHECK(general_field_integrand({4.0}, 2.0, 0.5, 1) ==
          doctest::Approx(1.0 / (2.0 * std::sqrt(2.0))).epsilon(1e-14));
    CHECK(general_field_integrand({1.0, 1.0}, 1.0, 0.5, 3) == 1.0);
    CHECK_THROWS_AS(general_field_integrand({1.0}, 1.0, 1.5, 1),
                    std::invalid_argument);
}

TEST_CASE("bound slack scale") {
    CHECK(bound_slack(0.0) == 1e-10);
    CHECK(bound_slack(-3.0) == doctest::Approx(4e-10).epsilon(1e-12));
}
