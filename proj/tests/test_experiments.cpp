#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "sheetlab/experiments.hpp"

using namespace sheetlab;

TEST_CASE("experiment registry is stable and alphabetical") {
    const auto& reg = experiment_registry();
    REQUIRE(reg.size() == 7);
    for (std::size_t i = 1; i < reg.size(); ++i)
        CHECK(reg[i - 1].name < reg[i].name);
    for (const auto& info : reg) CHECK_FALSE(info.description.empty());

    bool has_kahane = false, has_interior = false, has_mountford = false;
    for (const auto& info : reg) {
        has_kahane |= info.name == "kahane";
        has_interior |= info.name == "interior";
        has_mountford |= info.name == "mountford";
    }
    CHECK(has_kahane);
    CHECK(has_interior);
    CHECK(has_mountford);

    CHECK_THROWS_AS(run_experiment("nope", {}), std::invalid_argument);
}

TEST_CASE("report bookkeeping and serialization") {
    ExperimentReport r;
    r.name = "demo";
    r.seed = 5;
    r.parameters["n"] = 2;
    r.add_estimate("quantity", 1.5, 0.1);
    r.add_bound("holds", true, 0.2);
    CHECK(r.all_satisfied());
    r.add_bound("fails", false, -0.1);
    CHECK_FALSE(r.all_satisfied());

    auto j = report_json(r);
    CHECK(j.at("name") == "demo");
    CHECK(j.at("estimates").size() == 1);
    CHECK(j.at("bounds_checked").size() == 2);
    CHECK_FALSE(j.contains("runtime_seconds"));

    const std::string jpath = "test_experiments_report.json";
    const std::string cpath = "test_experiments_report.csv";
    write_report_json(r, jpath);
    write_report_csv(r, cpath);
    std::ifstream cin(cpath);
    REQUIRE(cin.good());
    std::string line;
    std::getline(cin, line);
    CHECK(line == "name,record,label,value,se,satisfied,slack");
    int rows = 0;
    while (std::getline(cin, line)) ++rows;
    CHECK(rows == 3);
    std::remove(jpath.c_str());
    std::remove(cpath.c_str());

    const auto summary = report_summary(r);
    CHECK(summary.find("VIOLATED") != std::string::npos);
    CHECK(summary.find("runtime") != std::string::npos);
}

TEST_CASE("anchored bridge suite passes and reruns identically") {
    auto r = exp_bridge_suite(2, GridSpec{1.0, 2.0, {2, 2}}, 500, 3);
    CHECK(r.name == "bridge_suite");
    CHECK(r.all_satisfied());
    CHECK_FALSE(r.estimates.empty());

    auto again = exp_bridge_suite(2, GridSpec{1.0, 2.0, {2, 2}}, 500, 3);
    CHECK(report_json(r).dump() == report_json(again).dump());

    auto deep = exp_bridge_suite(3, GridSpec{1.0, 2.0, {2, 2, 2}}, 200, 3);
    CHECK(deep.all_satisfied());
}

TEST_CASE("projection commutation suite passes on a small grid") {
    auto r = exp_commutation(2, GridSpec{1.0, 2.0, {3, 3}}, -1, 25, 5);
    CHECK(r.all_satisfied());
    // residual estimates present for the deterministic part
    bool has_resid = false;
    for (const auto& e : r.estimates)
        has_resid |= e.label.find("residual") != std::string::npos;
    CHECK(has_resid);
}

TEST_CASE("point hitting with a nested companion set") {
    auto f = make_cube(GridSpec{1.0, 2.0, {8, 8}});
    auto r = exp_level_hitting(2, 1, f, {0.0}, {0.75, 0.5, 0.25}, 100, 11);
    CHECK(r.all_satisfied());
    bool has_hit = false;
    for (const auto& e : r.estimates)
        has_hit |= e.label.find("hit") != std::string::npos;
    CHECK(has_hit);
}

TEST_CASE("two-point ratio stays within its envelope factor") {
    auto r = exp_joint_bound(2, 1, GridSpec{1.0, 2.0, {6, 6}}, {0.0}, 0.25,
                             40, 7);
    CHECK(r.all_satisfied());
}

TEST_CASE("interior detection smoke run") {
    auto f = make_cube(GridSpec{1.0, 2.0, {6, 6}});
    auto r = exp_interior(2, 1, f, 2.0, 4, 6, 2);
    CHECK(r.all_satisfied());
}

TEST_CASE("weighted path suite smoke run") {
    SelfIntersectionSpec spec;
    spec.r = {1.0, 1.0};
    spec.blocks = {{1.0, 2.0}, {3.0, 4.0}};
    auto r = exp_mountford(spec, 1, 6, 4);
    CHECK(r.all_satisfied());
}

TEST_CASE("image measure trend in the stabilizing regime") {
    // Voxels at 0.2 are still skin-dominated for this image; 0.1 -> 0.05 is
    // the coarsest pair whose sampling grid resolves the trend.
    auto r = exp_kahane(2, 3, "square", 30, {0.1, 0.05}, 21);
    CHECK(r.name == "kahane");
    CHECK(r.all_satisfied());
    CHECK(r.parameters.at("set_kind") == "square");
}

TEST_CASE("image measure trend in the decaying regime") {
    auto r = exp_kahane(2, 4, "cantor_product", 30, {0.2, 0.1}, 22, 0.2, 2);
    CHECK(r.all_satisfied());
}

TEST_CASE("kahane input validation") {
    CHECK_THROWS_AS(exp_kahane(2, 3, "square", 10, {0.1}, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(exp_kahane(2, 3, "square", 10, {0.1, 0.2}, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(exp_kahane(2, 3, "interval", 10, {0.2, 0.1}, 1),
                    std::invalid_argument);
    // a set whose dimension equals d/2 sits on the dichotomy boundary
    CHECK_THROWS_AS(exp_kahane(1, 2, "interval", 10, {0.2, 0.1}, 1),
                    std::invalid_argument);
}

TEST_CASE("settings route through the dispatcher") {
    ExperimentSettings s;
    s.n = 2;
    s.trials = 300;
    s.seed = 3;
    auto via = run_experiment("bridge_suite", s);
    auto direct = exp_bridge_suite(2, GridSpec{1.0, 2.0, {2, 2}}, 300, 3);
    CHECK(report_json(via).dump() == report_json(direct).dump());

    ExperimentSettings k;
    k.n = 2;
    k.d = 4;
    k.replicates = 20;
    k.voxels = {0.2, 0.1};
    k.set_kind = "cantor";
    k.level = 2;
    k.seed = 9;
    auto kr = run_experiment("kahane", k);
    CHECK(kr.parameters.at("set_kind") == "cantor_product");
}
