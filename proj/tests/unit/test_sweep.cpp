#include <doctest.h>

#include <random>

#include "timflow/errors.hpp"
#include "timflow/fixtures.hpp"
#include "timflow/io.hpp"
#include "timflow/sweep.hpp"

using namespace timflow;

namespace {

ObjectiveConfig sweep_config(double w_tab, double w_void_area, double w_void_bin,
                             double w_init) {
    ObjectiveConfig config;
    config.w_comp_cool = 0.0;
    config.w_comp_over = 1.0;
    config.w_comp_tab = w_tab;
    config.w_void_area = w_void_area;
    config.w_void_bin = w_void_bin;
    config.w_init_over = w_init;
    config.f_con = WeightKind::con;
    config.f_area = WeightKind::con;
    config.f_init = w_init > 0.0 ? WeightKind::lin : WeightKind::none;
    return config;
}

}  // namespace

TEST_CASE("sweep validation enforces the swept weight set") {
    SweepConfig sweep;
    sweep.runs_per_config = 2;
    sweep.segments = {2, 3};
    sweep.iterations = 10;
    sweep.configs = {sweep_config(100, 100, 0, 1000)};
    CHECK_NOTHROW(validate_sweep(sweep));

    sweep.configs.push_back(sweep_config(550, 0, 0, 0));  // 550 not in the set
    CHECK_THROWS_AS(validate_sweep(sweep), ValidationError);
    sweep.configs.pop_back();

    // the fixed methodology weights stay free
    sweep.configs[0].w_comp_over = 1.0;
    sweep.configs[0].w_comp_cool = 0.0;
    CHECK_NOTHROW(validate_sweep(sweep));

    sweep.runs_per_config = 0;
    CHECK_THROWS_AS(validate_sweep(sweep), ValidationError);
}

TEST_CASE("row aggregation arithmetic") {
    std::mt19937 rng(73);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<SweepRunRecord> records;
    for (int i = 0; i < 17; ++i) {
        SweepRunRecord r;
        r.coverage_fraction = u(rng);
        r.converged = u(rng) < 0.4;
        records.push_back(r);
    }
    const SweepRow row = row_from_records(sweep_config(100, 100, 0, 0), records);
    CHECK(row.runs == 17);
    double cov = 0.0;
    int conv = 0;
    for (const auto& r : records) {
        cov += r.coverage_fraction;
        conv += r.converged ? 1 : 0;
    }
    CHECK(row.coverage_ratio == cov / 17.0);
    CHECK(row.convergence_ratio == conv / 17.0);
    CHECK(row.average_performance == (row.coverage_ratio + row.convergence_ratio) / 2.0);
    CHECK(row.coverage_ratio >= 0.0);
    CHECK(row.coverage_ratio <= 1.0);
    CHECK(row.convergence_ratio >= 0.0);
    CHECK(row.convergence_ratio <= 1.0);
}

TEST_CASE("sweep documents round-trip and rows recompute from records") {
    SweepConfig sweep;
    sweep.runs_per_config = 2;
    sweep.segments = {2, 3};
    sweep.iterations = 25;
    sweep.configs = {sweep_config(100, 100, 0, 0), sweep_config(0, 0, 0, 0)};

    const SweepConfig reparsed = parse_sweep_json(
        R"({"schema":"timflow.sweep/1","runs_per_config":2,"segments":[2,3],"iterations":25,)"
        R"("configs":[)" +
        config_to_json(sweep.configs[0]) + "," + config_to_json(sweep.configs[1]) + "]}");
    CHECK(reparsed.runs_per_config == sweep.runs_per_config);
    CHECK(reparsed.segments == sweep.segments);
    CHECK(reparsed.configs.size() == 2);
    CHECK(reparsed.configs[0] == sweep.configs[0]);

    const Product product = fixtures::rectangle(24);
    const SweepOutcome outcome = run_sweep(product, sweep, 99, 2, {2, 1.0});
    REQUIRE(outcome.rows.size() == 2);
    CHECK(outcome.records.size() == 4);

    // recomputation from the persisted raw records is exact
    const auto records = parse_sweep_records_json(sweep_records_to_json(outcome.records));
    CHECK(records == outcome.records);
    for (std::size_t ci = 0; ci < outcome.rows.size(); ++ci) {
        std::vector<SweepRunRecord> mine;
        for (const auto& r : records)
            if (r.config_index == static_cast<int>(ci)) mine.push_back(r);
        const SweepRow recomputed = row_from_records(sweep.configs[ci], mine);
        CHECK(recomputed.coverage_ratio == outcome.rows[ci].coverage_ratio);
        CHECK(recomputed.convergence_ratio == outcome.rows[ci].convergence_ratio);
        CHECK(recomputed.average_performance == outcome.rows[ci].average_performance);
    }

    const auto rows = parse_sweep_rows_json(sweep_rows_to_json(outcome.rows));
    CHECK(rows.size() == outcome.rows.size());
    CHECK(rows[0] == outcome.rows[0]);

    // determinism across reruns
    const SweepOutcome again = run_sweep(product, sweep, 99, 1, {2, 1.0});
    CHECK(again.records == outcome.records);
}

TEST_CASE("run_converged applies the three conditions") {
    EvaluationReport report;
    report.coverage_fraction = 0.85;
    report.taboo_violation_fraction = 0.0;
    report.void_area_fraction = 0.0;
    CHECK(run_converged(report));
    report.coverage_fraction = 0.79;
    CHECK_FALSE(run_converged(report));
    report.coverage_fraction = 0.85;
    report.taboo_violation_fraction = 0.02;
    CHECK_FALSE(run_converged(report));
    report.taboo_violation_fraction = 0.005;
    report.void_area_fraction = 0.06;
    CHECK_FALSE(run_converged(report));
}
