#pragma once

#include <utility>
#include <vector>

#include "timflow/grid.hpp"
#include "timflow/product.hpp"

namespace timflow {

struct FlowSettings {
    int max_relax_iters = 10000;  ///< per gap level
    double tolerance = 1e-9;      ///< convergence: max height <= level * (1 + tolerance)
};

struct FlowSnapshot {
    double gap = 0.0;
    MaterialGrid state;
};

/// Converged state at each gap level of one compression run, strictly
/// decreasing in gap. Total volume (amounts + sink) is identical across
/// snapshots up to floating-point rounding.
struct FlowTrace {
    std::vector<FlowSnapshot> snapshots;

    const MaterialGrid& final_state() const { return snapshots.back().state; }
    double final_gap() const { return snapshots.back().gap; }
};

/// Squeeze the material down to target_gap through gap.n_steps linearly
/// spaced levels starting from the current max height. At each level, cells
/// above the level shed their entire excess to their 4-neighbors,
/// proportionally to the height difference where a neighbor is lower
/// (off-grid counts as height 0 and collects into offgrid_sink), or in equal
/// quarters when no neighbor is lower. Updates are synchronous: every new
/// value is a function of the pre-step state only, so a state already within
/// tolerance passes through bit-identically.
///
/// Throws FlowError naming the level if a level fails to converge within
/// settings.max_relax_iters steps.
FlowTrace compress(const MaterialGrid& initial, const GapSpec& gap, double target_gap,
                   const FlowSettings& settings = {});

/// Per-cell coverage of the joined state: min(height / target_gap, 1).
Field normalize_compressed(const MaterialGrid& final_state, double target_gap);

/// Tolerance-mode compression: first down to g_max, then continue from that
/// state down to g_min (not recomputed from scratch).
std::pair<FlowTrace, FlowTrace> compress_two_stage(const MaterialGrid& initial,
                                                   const GapSpec& gap,
                                                   const FlowSettings& settings = {});

namespace detail {

/// One synchronous relaxation step at `level`. `order`, when non-empty, is a
/// permutation of all cell indices used as the update traversal; the result
/// is traversal-order independent because each cell pulls its inflows from
/// the pre-step state in a fixed neighbor order. Returns the new max height.
double relax_step(MaterialGrid& state, double level, const std::vector<int>& order = {});

}  // namespace detail

}  // namespace timflow
