#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "timflow/objective.hpp"
#include "timflow/optimize.hpp"

namespace timflow {

/// Convergence conditions a run must meet to count as converged: coverage of
/// the cooling surface, taboo violation and void area relative to the cooling
/// area.
inline constexpr double kConvergedCoverage = 0.80;
inline constexpr double kConvergedTaboo = 0.01;
inline constexpr double kConvergedVoidArea = 0.05;

bool run_converged(const EvaluationReport& report);

/// One hyperparameter study: a list of objective configurations, each run
/// runs_per_config times with segment counts cycling over `segments`.
struct SweepConfig {
    int runs_per_config = 100;
    std::pair<int, int> segments = {5, 10};
    int iterations = 1000;
    std::vector<ObjectiveConfig> configs;
};

/// The four swept weights (comp_tab, init_over, void_bin, void_area) must be
/// drawn from {0, 10, 100, 1000, 10000}; comp_cool/comp_over are the fixed
/// methodology constants and stay free.
void validate_sweep(const SweepConfig& sweep);

/// Raw outcome of a single run, persisted so summary rows can be re-derived.
struct SweepRunRecord {
    int config_index = 0;
    std::uint64_t seed = 0;
    int segments = 0;
    double coverage_fraction = 0.0;
    double taboo_violation_fraction = 0.0;
    double void_area_fraction = 0.0;
    double total_loss = 0.0;
    bool converged = false;

    bool operator==(const SweepRunRecord&) const = default;
};

struct SweepRow {
    ObjectiveConfig config;
    int runs = 0;
    double coverage_ratio = 0.0;        ///< mean cooling coverage over runs
    double convergence_ratio = 0.0;     ///< fraction of converged runs
    double average_performance = 0.0;   ///< exactly (coverage + convergence) / 2

    bool operator==(const SweepRow&) const = default;
};

/// Aggregate the records belonging to one config into its summary row;
/// the same arithmetic run_sweep uses, so recomputation from persisted
/// records is exact.
SweepRow row_from_records(const ObjectiveConfig& config,
                          const std::vector<SweepRunRecord>& records);

struct SweepOutcome {
    std::vector<SweepRow> rows;
    std::vector<SweepRunRecord> records;
    std::vector<std::string> failures;  ///< per-config/per-trial failure notes
};

/// Run every config of the sweep on the product. Deterministic per base_seed;
/// failures are recorded and the sweep continues.
SweepOutcome run_sweep(const Product& product, const SweepConfig& sweep,
                       std::uint64_t base_seed, int parallelism = 1,
                       const RasterSettings& raster = {}, const FlowSettings& flow = {},
                       const std::function<void(int, int)>& per_config_progress = {});

SweepConfig parse_sweep_json(const std::string& text);
SweepConfig load_sweep(const std::string& file);
std::string sweep_rows_to_json(const std::vector<SweepRow>& rows);
std::vector<SweepRow> parse_sweep_rows_json(const std::string& text);
std::string sweep_records_to_json(const std::vector<SweepRunRecord>& records);
std::vector<SweepRunRecord> parse_sweep_records_json(const std::string& text);

}  // namespace timflow
