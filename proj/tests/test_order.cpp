#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <random>

#include "sheetlab/order.hpp"

using namespace sheetlab;

TEST_CASE("mask construction and enumeration") {
    OrderMask full = OrderMask::full(3);
    CHECK(full.bits == 7u);
    CHECK(full.dim == 3);
    CHECK(full.contains(0));
    CHECK(full.contains(2));

    auto all = OrderMask::all(2);
    REQUIRE(all.size() == 4);
    CHECK(all[0].bits == 0u);
    CHECK(all[3].bits == 3u);

    CHECK_THROWS_AS(OrderMask(4u, 2), std::invalid_argument);
    CHECK_THROWS_AS(OrderMask(0u, 0), std::invalid_argument);
    CHECK_THROWS_AS(OrderMask::all(21), std::invalid_argument);
}

TEST_CASE("masked order on worked pairs") {
    OrderMask full = OrderMask::full(2);
    CHECK(leq({1.0, 1.0}, {2.0, 3.0}, full));
    CHECK_FALSE(leq({2.0, 1.0}, {1.0, 3.0}, full));

    // mask {axis 0}: <= on axis 0, >= on axis 1
    OrderMask m(1u, 2);
    CHECK(leq({1.0, 5.0}, {2.0, 3.0}, m));
    CHECK_FALSE(leq({1.0, 2.0}, {2.0, 3.0}, m));

    // ties belong to both directions
    ParamPoint p{1.5, 2.5};
    for (const auto& pi : OrderMask::all(2)) {
        CHECK(leq(p, p, pi));
    }

    CHECK_THROWS_AS(leq({1.0}, {1.0, 2.0}, full), std::invalid_argument);
}

TEST_CASE("find_mask produces a mask under which a precedes b") {
    auto m = find_mask({1.0, 5.0}, {2.0, 3.0});
    CHECK(m.bits == 1u);
    CHECK(leq({1.0, 5.0}, {2.0, 3.0}, m));

    // ties go to the mask
    auto tied = find_mask({1.0, 1.0}, {1.0, 2.0});
    CHECK(tied.bits == 3u);

    std::mt19937_64 eng(7);
    std::uniform_real_distribution<double> uni(0.0, 4.0);
    for (int trial = 0; trial < 200; ++trial) {
        ParamPoint a{uni(eng), uni(eng), uni(eng)};
        ParamPoint b{uni(eng), uni(eng), uni(eng)};
        CHECK(leq(a, b, find_mask(a, b)));
    }
}

TEST_CASE("meet is the greatest lower bound of the masked order") {
    OrderMask m(1u, 2);
    auto w = meet({1.0, 5.0}, {2.0, 3.0}, m);
    CHECK(w[0] == 1.0);   // min on the mask axis
    CHECK(w[1] == 5.0);   // max off it

    std::mt19937_64 eng(11);
    std::uniform_real_distribution<double> uni(0.0, 4.0);
    for (const auto& pi : OrderMask::all(2)) {
        for (int trial = 0; trial < 100; ++trial) {
            ParamPoint a{uni(eng), uni(eng)};
            ParamPoint b{uni(eng), uni(eng)};
            auto g = meet(a, b, pi);
            CHECK(g == meet(b, a, pi));
            CHECK(meet(a, a, pi) == a);
            CHECK(leq(g, a, pi));
            CHECK(leq(g, b, pi));
            // any common lower bound sits below the meet
            ParamPoint c{uni(eng), uni(eng)};
            if (leq(c, a, pi) && leq(c, b, pi)) CHECK(leq(c, g, pi));
        }
    }
}

TEST_CASE("grid spec validation") {
    GridSpec ok{1.0, 2.0, {3, 3}};
    CHECK_NOTHROW(ok.validate());
    CHECK(ok.dim() == 2);

    CHECK_THROWS_AS((GridSpec{2.0, 1.0, {3}}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((GridSpec{-1.0, 1.0, {3}}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((GridSpec{0.0, 1.0, {}}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((GridSpec{0.0, 1.0, {0}}).validate(), std::invalid_argument);
}

TEST_CASE("discrete set validation and file round trip") {
    DiscreteSet f;
    f.dim = 2;
    f.points = {{1.0, 2.0}, {1.5, 0.25}};
    CHECK_NOTHROW(f.validate());

    DiscreteSet dup = f;
    dup.points.push_back({1.0, 2.0});
    CHECK_THROWS_AS(dup.validate(), std::invalid_argument);

    DiscreteSet neg = f;
    neg.points.push_back({-1.0, 0.0});
    CHECK_THROWS_AS(neg.validate(), std::invalid_argument);

    const std::string path = "test_order_set.txt";
    f.to_file(path);
    auto g = DiscreteSet::from_file(path);
    CHECK(g.dim == f.dim);
    REQUIRE(g.points == f.points);

    // comments and blank lines are ignored
    {
        std::FILE* out = std::fopen(path.c_str(), "w");
        REQUIRE(out);
        std::fputs("# header comment\n\n1 2 # trailing\n3 4\n", out);
        std::fclose(out);
    }
    auto h = DiscreteSet::from_file(path);
    REQUIRE(h.size() == 2);
    CHECK(h.points[0] == ParamPoint{1.0, 2.0});
    CHECK(h.points[1] == ParamPoint{3.0, 4.0});
    std::remove(path.c_str());
}

TEST_CASE("rotation admission") {
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
    CHECK_NOTHROW(require_rotation(id));

    Eigen::MatrixXd refl = id;
    refl(1, 1) = -1.0;  // det -1
    CHECK_THROWS_AS(require_rotation(refl), std::invalid_argument);

    Eigen::MatrixXd skew = id;
    skew(0, 1) = 0.5;
    CHECK_THROWS_AS(require_rotation(skew), std::invalid_argument);
}

TEST_CASE("applying rotations and range errors") {
    DiscreteSet f;
    f.dim = 2;
    f.points = {{1.0, 0.0}};

    Eigen::MatrixXd quarter(2, 2);  // 90 degrees counterclockwise
    quarter << 0.0, -1.0, 1.0, 0.0;
    auto g = apply_rotation(quarter, f);
    CHECK(g.points[0][0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(g.points[0][1] == doctest::Approx(1.0).epsilon(1e-12));

    DiscreteSet up;
    up.dim = 2;
    up.points = {{0.0, 1.0}};  // image (-1, 0) leaves the orthant
    try {
        apply_rotation(quarter, up);
        FAIL("expected RotationRangeError");
    } catch (const RotationRangeError& e) {
        CHECK(e.axis == 0);
        CHECK(e.image[0] == doctest::Approx(-1.0));
    }
}

TEST_CASE("rotation cover keeps the set in the orthant, identity first") {
    DiscreteSet f;
    f.dim = 2;
    for (double x : {1.0, 1.5, 2.0})
        for (double y : {1.0, 1.5, 2.0}) f.points.push_back({x, y});

    auto rs = rotation_cover(6, f, 42);
    REQUIRE(!rs.empty());
    CHECK((rs.front() - Eigen::MatrixXd::Identity(2, 2)).norm() == 0.0);
    for (const auto& r : rs) {
        CHECK_NOTHROW(require_rotation(r));
        CHECK_NOTHROW(apply_rotation(r, f));
    }

    auto again = rotation_cover(6, f, 42);
    REQUIRE(again.size() == rs.size());
    for (std::size_t i = 0; i < rs.size(); ++i)
        CHECK((rs[i] - again[i]).norm() == 0.0);

    auto other = rotation_cover(6, f, 43);
    REQUIRE(other.size() >= 2);
    CHECK((other[1] - rs[1]).norm() != 0.0);
}

TEST_CASE("rotation cover in three dimensions") {
    DiscreteSet f;
    f.dim = 3;
    f.points = {{1.0, 1.0, 1.0}, {2.0, 2.0, 2.0}, {1.0, 2.0, 1.5}};
    auto rs = rotation_cover(4, f, 9);
    REQUIRE(!rs.empty());
    for (const auto& r : rs) {
        CHECK(r.rows() == 3);
        CHECK_NOTHROW(require_rotation(r));
        CHECK_NOTHROW(apply_rotation(r, f));
    }
}

TEST_CASE("rotation persistence round trip") {
    DiscreteSet f;
    f.dim = 2;
    f.points = {{1.0, 1.0}, {2.0, 2.0}, {1.0, 2.0}};
    auto rs = rotation_cover(4, f, 5);

    const std::string path = "test_order_rotations.json";
    save_rotations(path, rs);
    auto back = load_rotations(path);
    REQUIRE(back.size() == rs.size());
    for (std::size_t i = 0; i < rs.size(); ++i)
        CHECK((rs[i] - back[i]).norm() == 0.0);
    std::remove(path.c_str());
}
