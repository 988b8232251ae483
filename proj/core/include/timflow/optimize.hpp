#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "timflow/cmaes.hpp"
#include "timflow/objective.hpp"

namespace timflow {

struct TrialResult {
    DispensePath best_path;
    EvaluationReport best_report;
    std::vector<double> loss_history;  ///< best loss per iteration
    long evaluations = 0;
    std::uint64_t seed = 0;
    int segments = 0;

    bool operator==(const TrialResult&) const = default;
};

/// Minimize the evaluator's loss over the free path coordinates of an
/// (n_segments+1)-point path. Free coordinates start at the cooling-area
/// centroid, jittered per seed; sigma0 defaults to grid/4. When a template
/// path is given its point count wins and its frozen coordinates are pinned:
/// they are excluded from the search vector and re-injected bit-identically
/// before every evaluation. The candidate feedrate is recomputed each
/// evaluation so every candidate dispenses exactly the required volume.
///
/// Throws TrialError when an objective evaluation fails.
TrialResult optimize(const Evaluator& evaluator, int n_segments, const CmaesConfig& cmaes,
                     const std::optional<DispensePath>& template_path = std::nullopt,
                     int eval_threads = 1);

/// Independent seeded trials (seed = base seed + trial index) with segment
/// counts cycling over [segment_range.first, segment_range.second],
/// distributed over `parallelism` workers. Failed trials are reported into
/// `failures` (when given) and skipped. Results are sorted by descending
/// cooling coverage, ties by ascending total loss.
std::vector<TrialResult> run_trials(const Evaluator& evaluator,
                                    std::pair<int, int> segment_range, int n_trials,
                                    const CmaesConfig& base_config, int parallelism = 1,
                                    const std::function<void(const TrialResult&)>& on_trial = {},
                                    std::vector<std::string>* failures = nullptr);

/// Comparator used by run_trials (exposed for result stores).
bool better_trial(const TrialResult& a, const TrialResult& b);

/// Bisect the total dispensed volume of a fixed path until the cooling
/// coverage at the final gap is within `tolerance` of target_coverage;
/// returns the calibrated feedrate. Coverage is monotone in volume under the
/// flow model. Search interval is [0, 4x required volume]; an unreachable
/// target throws ValidationError.
double calibrate_amount(const Evaluator& evaluator, const DispensePath& path,
                        double target_coverage, double tolerance = 0.002);

}  // namespace timflow
