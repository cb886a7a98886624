#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "xtfc/bench.hpp"

using namespace xtfc;

TEST_CASE("single solves at the published hyperparameters meet the headline errors") {
    RunConfig cfg;
    cfg.seed = 1;

    const RunReport ode1 = run_once("ode1", cfg);
    CHECK(ode1.converged);
    CHECK(ode1.test_max_error <= 1e-13);

    const RunReport pde1 = run_once("pde1", cfg);
    CHECK(pde1.converged);
    CHECK(pde1.iterations == 1);
    CHECK(pde1.test_max_error <= 1e-10);

    const RunReport pde4 = run_once("pde4", cfg);
    CHECK(pde4.test_max_error <= 1e-4);
}

TEST_CASE("reports echo the configuration and satisfy the field invariants") {
    RunConfig cfg;
    cfg.seed = 3;
    cfg.neurons = 40;
    cfg.points = {12, 12};
    cfg.activation = ActivationKind::sin;
    cfg.weight_range = {{-2.0, 2.0}};
    const RunReport r = run_once("pde2", cfg);
    CHECK(r.problem == "pde2");
    CHECK(r.neurons == 40);
    CHECK(r.points == std::vector<int>{12, 12});
    CHECK(r.activation == "sin");
    CHECK(r.weight_lo == -2.0);
    CHECK(r.weight_hi == 2.0);
    CHECK(r.seed == 3);
    CHECK(r.train_max_error >= 0.0);
    CHECK(r.train_mean_error <= r.train_max_error);
    CHECK(r.test_mean_error <= r.test_max_error);
    CHECK(r.solve_seconds > 0.0);
    CHECK(r.total_seconds > 0.0);
    CHECK(r.rcond > 0.0);
}

TEST_CASE("a single per-side count is broadcast to every dimension") {
    RunConfig cfg;
    cfg.points = {9};
    const RunReport r = run_once("pde5", cfg);
    CHECK(r.points == std::vector<int>{9, 9, 9});
    RunConfig bad;
    bad.points = {9, 9};
    CHECK_THROWS_AS(run_once("pde5", bad), std::invalid_argument);
}

TEST_CASE("identical configurations reproduce identical error fields") {
    RunConfig cfg;
    cfg.seed = 11;
    const RunReport a = run_once("pde2", cfg);
    const RunReport b = run_once("pde2", cfg);
    CHECK(a.equal_modulo_timing(b));
    cfg.seed = 12;
    const RunReport c = run_once("pde2", cfg);
    CHECK_FALSE(a.equal_modulo_timing(c));
}

TEST_CASE("reports round-trip through JSON") {
    RunConfig cfg;
    cfg.seed = 5;
    const RunReport r = run_once("ode1", cfg);
    const json j = r.to_json();
    const RunReport back = RunReport::from_json(json::parse(j.dump()));
    CHECK(back.to_json() == j);
}

TEST_CASE("a one-trial study reduces to the single run") {
    RunConfig cfg;
    cfg.seed = 21;
    const McSummary mc = monte_carlo("pde1", cfg, 1);
    const RunReport r = run_once("pde1", cfg);
    REQUIRE(mc.max_test_errors.size() == 1);
    CHECK(mc.max_test_errors[0] == r.test_max_error);
    CHECK(mc.median == r.test_max_error);
    CHECK(mc.trials == 1);
}

TEST_CASE("seeded robustness study over the first nonlinear benchmark") {
    RunConfig cfg;
    cfg.seed = 1;
    const McSummary mc = monte_carlo("ode1", cfg, 1000);
    CHECK(mc.trials == 1000);
    CHECK(mc.median <= 1e-13);
    int binned = 0;
    for (const auto& [edge, count] : mc.histogram) binned += count;
    CHECK(binned == 1000);
    CHECK(mc.p10 <= mc.p25);
    CHECK(mc.p25 <= mc.median);
    CHECK(mc.median <= mc.p75);
    CHECK(mc.p75 <= mc.p90);
    std::ostringstream csv;
    mc.write_histogram_csv(csv);
    CHECK_THAT(csv.str(), Catch::Matchers::StartsWith("log10_lo,log10_hi,count\n"));
}

TEST_CASE("the coupled system never fails across one hundred draws") {
    RunConfig cfg;
    cfg.seed = 1;
    const McSummary mc = monte_carlo("sode2", cfg, 100);
    CHECK(mc.failures == 0);
    CHECK(mc.median <= 1e-7);
}

TEST_CASE("accuracy improves along the training-point sweep") {
    RunConfig cfg;
    cfg.seed = 1;
    const auto& pde1 = find_problem("pde1");
    const std::array<int, 3> values{10, 20, 30};
    const SweepCurve curve = sweep(pde1, SweepAxis::points, values, 3, cfg);
    REQUIRE(curve.points.size() == 3);
    // non-increasing within a one-order noise band
    CHECK(curve.points[1].max_test_error <= 10.0 * curve.points[0].max_test_error);
    CHECK(curve.points[2].max_test_error <= 10.0 * curve.points[1].max_test_error);
    CHECK(curve.points[2].max_test_error < curve.points[0].max_test_error);
    std::ostringstream csv;
    curve.write_csv(csv);
    CHECK_THAT(csv.str(),
               Catch::Matchers::StartsWith(
                   "axis,value,trials,max_test_error,median_test_error,failures\n"));
    CHECK_THAT(csv.str(), Catch::Matchers::ContainsSubstring("points,30,3,"));
}

TEST_CASE("a singleton sweep equals the Monte-Carlo aggregate") {
    RunConfig cfg;
    cfg.seed = 9;
    const auto& pde1 = find_problem("pde1");
    const std::array<int, 1> values{12};
    const SweepCurve curve = sweep(pde1, SweepAxis::points, values, 2, cfg);
    RunConfig mc_cfg = cfg;
    mc_cfg.points = {12, 12};
    const McSummary mc = monte_carlo(pde1, mc_cfg, 2);
    REQUIRE(curve.points.size() == 1);
    CHECK(curve.points[0].max_test_error ==
          *std::max_element(mc.max_test_errors.begin(), mc.max_test_errors.end()));
}

TEST_CASE("sweep values must increase strictly") {
    RunConfig cfg;
    const auto& pde1 = find_problem("pde1");
    const std::array<int, 2> bad{20, 20};
    CHECK_THROWS_AS(sweep(pde1, SweepAxis::neurons, bad, 1, cfg), std::invalid_argument);
}

TEST_CASE("comparison tables carry the published baselines") {
    RunConfig cfg;
    cfg.seed = 1;
    const auto rows = compare_table(find_problem("pde1"), cfg);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0].method == "X-TFC");
    CHECK(rows[0].provenance == "measured");
    CHECK(rows[0].test_max_error <= 1e-10);
    auto find_row = [&rows](const std::string& m) {
        for (const auto& r : rows)
            if (r.method == m) return r;
        FAIL("missing row " + m);
        return rows[0];
    };
    CHECK(find_row("FEM").test_max_error == 1.5e-5);
    CHECK(find_row("FEM").train_max_error == 2e-8);
    CHECK(find_row("CNN").test_max_error == 3.2e-2);
    CHECK_FALSE(find_row("CNN").has_train);
    CHECK(find_row("BNN").test_max_error == 2.4e-4);

    const auto rows2 = compare_table(find_problem("pde2"), cfg);
    CHECK(rows2.size() == 4);
    bool saw_cnn = false;
    for (const auto& r : rows2)
        if (r.method == "CNN") {
            saw_cnn = true;
            CHECK(r.test_max_error == 3e-3);
        }
    CHECK(saw_cnn);

    const auto rows3 = compare_table(find_problem("pde3"), cfg);
    CHECK(rows3.size() == 3);
    for (const auto& r : rows3)
        if (r.method == "Lagaris") CHECK(r.test_max_error == 1.5e-5);

    CHECK_THROWS_AS(compare_table(find_problem("pde4"), cfg), std::invalid_argument);

    std::ostringstream csv;
    write_compare_csv(csv, "pde1", rows);
    CHECK_THAT(csv.str(), Catch::Matchers::StartsWith(
                              "problem,method,train_max_error,test_max_error,provenance\n"));
    CHECK_THAT(csv.str(), Catch::Matchers::ContainsSubstring("pde1,FEM,2e-08,1.5e-05,published"));
}
