#include "timflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "timflow/errors.hpp"

namespace timflow {

namespace {

constexpr int kDirX[4] = {-1, 1, 0, 0};
constexpr int kDirY[4] = {0, 0, -1, 1};

// Scratch buffers reused across relaxation steps of one compress() call.
struct Relaxer {
    std::vector<double> heights;   // pre-step heights
    std::vector<double> excess;    // shed volume, valid where shed_mark == mark
    std::vector<double> wsum;      // shedding weight sum, same validity
    std::vector<std::uint32_t> shed_mark;
    std::vector<std::uint32_t> touch_mark;
    std::vector<int> shedding;     // canonical order
    std::vector<int> touched;      // shedding cells plus their in-grid neighbors
    std::uint32_t mark = 0;

    void resize(std::size_t n) {
        heights.resize(n);
        excess.resize(n);
        wsum.resize(n);
        shed_mark.assign(n, 0);
        touch_mark.assign(n, 0);
    }
};

// One synchronous step: every over-capacity cell sheds its entire excess,
// split among the 4 neighbors proportionally to max(h - h_neighbor, 0)
// (off-grid neighbors count as height 0), or in equal quarters when no
// neighbor is lower. New values are pulled per cell from the pre-step state
// in fixed neighbor order, so the traversal order cannot affect the result.
// Returns the new max height; `order`, when non-empty, is a permutation of
// all cell indices to traverse.
double synchronous_step(MaterialGrid& state, double level, const std::vector<int>& order,
                        Relaxer& rx) {
    const int w = state.width, h = state.height;
    const std::size_t n = state.amounts.size();
    const double area = state.cell_area();
    if (rx.heights.size() != n) rx.resize(n);
    ++rx.mark;

    double pre_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        rx.heights[i] = state.amounts[i] / area;
        pre_max = std::max(pre_max, rx.heights[i]);
    }
    if (pre_max <= level) return pre_max;

    rx.shedding.clear();
    rx.touched.clear();
    auto touch = [&](int idx) {
        if (rx.touch_mark[static_cast<std::size_t>(idx)] != rx.mark) {
            rx.touch_mark[static_cast<std::size_t>(idx)] = rx.mark;
            rx.touched.push_back(idx);
        }
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int idx = y * w + x;
            const double hc = rx.heights[static_cast<std::size_t>(idx)];
            if (hc <= level) continue;
            double weight_sum = 0.0;
            for (int d = 0; d < 4; ++d) {
                const int nx = x + kDirX[d];
                const int ny = y + kDirY[d];
                if (nx < 0 || ny < 0 || nx >= w || ny >= h) weight_sum += hc;
                else weight_sum += std::max(hc - rx.heights[static_cast<std::size_t>(ny) * w + nx], 0.0);
            }
            rx.excess[static_cast<std::size_t>(idx)] = (hc - level) * area;
            rx.wsum[static_cast<std::size_t>(idx)] = weight_sum;
            rx.shed_mark[static_cast<std::size_t>(idx)] = rx.mark;
            rx.shedding.push_back(idx);
            touch(idx);
            for (int d = 0; d < 4; ++d) {
                const int nx = x + kDirX[d];
                const int ny = y + kDirY[d];
                if (nx >= 0 && ny >= 0 && nx < w && ny < h) touch(ny * w + nx);
            }
        }
    }
    if (rx.shedding.empty()) return pre_max;  // everything within level by strict compare

    auto update_cell = [&](int idx) {
        const int x = idx % w;
        const int y = idx / w;
        const double hc = rx.heights[static_cast<std::size_t>(idx)];
        double value = std::min(hc, level) * area;
        for (int d = 0; d < 4; ++d) {
            const int nx = x + kDirX[d];
            const int ny = y + kDirY[d];
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const std::size_t nidx = static_cast<std::size_t>(ny) * w + nx;
            if (rx.shed_mark[nidx] != rx.mark) continue;
            const double hb = rx.heights[nidx];
            const double wb = std::max(hb - hc, 0.0);
            value += rx.wsum[nidx] > 0.0 ? rx.excess[nidx] * wb / rx.wsum[nidx]
                                         : rx.excess[nidx] * 0.25;
        }
        state.amounts[static_cast<std::size_t>(idx)] = value;
    };

    if (order.empty()) {
        for (const int idx : rx.touched) update_cell(idx);
    } else {
        for (const int idx : order)
            if (rx.touch_mark[static_cast<std::size_t>(idx)] == rx.mark) update_cell(idx);
    }

    // off-grid shares, accumulated in canonical cell order
    for (const int idx : rx.shedding) {
        const int x = idx % w;
        const int y = idx / w;
        int missing = 0;
        for (int d = 0; d < 4; ++d) {
            const int nx = x + kDirX[d];
            const int ny = y + kDirY[d];
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) ++missing;
        }
        if (missing == 0) continue;
        const std::size_t i = static_cast<std::size_t>(idx);
        const double per_side = rx.wsum[i] > 0.0 ? rx.excess[i] * rx.heights[i] / rx.wsum[i]
                                                 : rx.excess[i] * 0.25;
        state.offgrid_sink += per_side * missing;
    }

    double new_max = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        new_max = std::max(new_max, state.amounts[i]);
    return new_max / area;
}

std::vector<double> gap_schedule(double start, double target, int n_steps) {
    if (start <= target || n_steps <= 1) return {target};
    std::vector<double> levels;
    levels.reserve(static_cast<std::size_t>(n_steps));
    for (int k = 1; k < n_steps; ++k)
        levels.push_back(start + (target - start) * k / n_steps);
    levels.push_back(target);
    return levels;
}

}  // namespace

FlowTrace compress(const MaterialGrid& initial, const GapSpec& gap, double target_gap,
                   const FlowSettings& settings) {
    if (!(target_gap > 0.0))
        throw ValidationError("compress: target gap must be > 0");
    if (gap.n_steps < 1)
        throw ValidationError("compress: gap n_steps must be >= 1");

    MaterialGrid state = initial;
    const double start = std::max(state.max_height(), target_gap);
    const std::vector<double> levels = gap_schedule(start, target_gap, gap.n_steps);

    FlowTrace trace;
    trace.snapshots.reserve(levels.size());
    Relaxer rx;
    for (const double level : levels) {
        const double limit = level * (1.0 + settings.tolerance);
        double max_h = state.max_height();
        int iters = 0;
        while (max_h > limit) {
            if (++iters > settings.max_relax_iters)
                throw FlowError("flow relaxation did not converge at gap level " +
                                std::to_string(level) + " within " +
                                std::to_string(settings.max_relax_iters) + " steps");
            max_h = synchronous_step(state, level, {}, rx);
        }
        trace.snapshots.push_back({level, state});
    }
    return trace;
}

Field normalize_compressed(const MaterialGrid& final_state, double target_gap) {
    if (!(target_gap > 0.0))
        throw ValidationError("normalize_compressed: target gap must be > 0");
    Field out(final_state.width, final_state.height);
    const double area = final_state.cell_area();
    for (std::size_t i = 0; i < final_state.amounts.size(); ++i)
        out.values[i] = std::min(final_state.amounts[i] / (area * target_gap), 1.0);
    return out;
}

std::pair<FlowTrace, FlowTrace> compress_two_stage(const MaterialGrid& initial,
                                                   const GapSpec& gap,
                                                   const FlowSettings& settings) {
    if (!(gap.g_min <= gap.g_max))
        throw ValidationError("compress_two_stage: g_min must be <= g_max");
    FlowTrace trace_max = compress(initial, gap, gap.g_max, settings);
    FlowTrace trace_min = compress(trace_max.final_state(), gap, gap.g_min, settings);
    return {std::move(trace_max), std::move(trace_min)};
}

namespace detail {

double relax_step(MaterialGrid& state, double level, const std::vector<int>& order) {
    Relaxer rx;
    return synchronous_step(state, level, order, rx);
}

}  // namespace detail

}  // namespace timflow
