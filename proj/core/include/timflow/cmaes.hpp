#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace timflow {

struct CmaesConfig {
    int population = 0;        ///< lambda; 0 picks 4 + floor(3 ln n)
    double sigma0 = 0.0;       ///< initial step size; 0 lets the caller pick (grid/4)
    int max_iterations = 1000;
    std::uint64_t seed = 0;
    int restart_count = 0;     ///< independent reseeded restarts beyond the first run

    bool operator==(const CmaesConfig&) const = default;
};

/// Per-iteration diagnostics, reported after the covariance update.
struct CmaesIterationStats {
    int iteration = 0;
    double best_loss = 0.0;       ///< best of this generation
    double sigma = 0.0;
    double min_eigenvalue = 0.0;  ///< of C, before the repair floor
    double max_eigenvalue = 0.0;
};

struct CmaesResult {
    std::vector<double> best_x;
    double best_loss = 0.0;
    std::vector<double> loss_history;  ///< best loss of each generation
    long evaluations = 0;
    int iterations = 0;
};

using CmaesObjective = std::function<double(const std::vector<double>&)>;
using CmaesCallback = std::function<void(const CmaesIterationStats&)>;

/// (mu/mu_w, lambda)-CMA-ES with rank-one and rank-mu covariance updates and
/// the canonical constant choices. Sampling uses an internal Box-Muller
/// generator over mt19937_64 raw bits, so runs are reproducible across
/// standard libraries. When eval_threads > 1, the candidates of a generation
/// are evaluated concurrently (the objective must be thread-safe); results
/// are collected by index, so threading never changes the outcome.
CmaesResult cmaes_minimize(const CmaesObjective& objective, std::vector<double> initial_mean,
                           double sigma0, const CmaesConfig& config,
                           const CmaesCallback& callback = {}, int eval_threads = 1);

}  // namespace timflow
