#include "timflow/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "timflow/errors.hpp"
#include "timflow/imageops.hpp"

namespace timflow {

double apply_weighting(WeightKind kind, double x, double lin_slope) {
    switch (kind) {
        case WeightKind::none: return 0.0;
        case WeightKind::con: return x;
        case WeightKind::lin: return lin_slope * x;
        case WeightKind::squ: return x * x;
        case WeightKind::log: return -std::log(1.0 - std::min(x, 1.0 - 1e-6));
    }
    return 0.0;
}

void validate_config(const ObjectiveConfig& config) {
    const double weights[] = {config.w_comp_cool, config.w_comp_over, config.w_comp_tab,
                              config.w_init_over, config.w_void_bin, config.w_void_area};
    for (const double w : weights)
        if (!(w >= 0.0)) throw ValidationError("objective weights must be >= 0");
    if (config.f_con != WeightKind::con && config.f_con != WeightKind::log)
        throw ValidationError("f_con must be 'con' or 'log'");
    if (config.f_area == WeightKind::none)
        throw ValidationError("f_area must be one of 'con', 'lin', 'squ', 'log'");
    if (config.f_init == WeightKind::con || config.f_init == WeightKind::squ)
        throw ValidationError("f_init must be one of 'none', 'lin', 'log'");
    if (!(config.lin_slope > 0.0))
        throw ValidationError("lin_slope must be > 0");
}

Field target_depth(const Field& target) {
    BitField support = binarize(target, 0.0);
    const std::size_t set = support.count();
    if (set == 0) return Field(target.width, target.height, 0.0);
    if (set == support.size())
        throw ValidationError("target mask covers the entire grid; depth is undefined");
    BitField complement(target.width, target.height);
    for (std::size_t i = 0; i < support.bits.size(); ++i)
        complement.bits[i] = support.bits[i] ? 0 : 1;
    return distance_transform(complement);
}

double coverage_flat_term(const Field& m_comp, const Field& target, double cool_capacity,
                          WeightKind f_con, bool cooling_target, double lin_slope) {
    if (!(cool_capacity > 0.0))
        throw ValidationError("coverage_flat_term: cooling capacity must be > 0");
    double cover = 0.0;
    for (std::size_t i = 0; i < m_comp.values.size(); ++i)
        cover += m_comp.values[i] * target.values[i];
    const double clipped = std::min(cover / cool_capacity, 1.0);
    return apply_weighting(f_con, cooling_target ? 1.0 - clipped : clipped, lin_slope);
}

Field area_weight_field(const Field& target, double max_depth_cool, WeightKind f_area,
                        double lin_slope) {
    if (!(max_depth_cool > 0.0))
        throw ValidationError("area_weight_field: max cooling depth must be > 0");
    Field depth = target_depth(target);
    Field weights(target.width, target.height);
    for (std::size_t i = 0; i < depth.values.size(); ++i) {
        const double d = std::min(depth.values[i], max_depth_cool) / max_depth_cool;
        weights.values[i] = apply_weighting(f_area, d, lin_slope);
    }
    return weights;
}

double coverage_area_term(const BitField& covered, const Field& weights,
                          double weighted_cool_capacity) {
    if (!(weighted_cool_capacity > 0.0))
        throw ValidationError("coverage_area_term: weighted cooling capacity must be > 0");
    double sum = 0.0;
    for (std::size_t i = 0; i < covered.bits.size(); ++i)
        if (covered.bits[i]) sum += weights.values[i];
    return std::clamp(sum / weighted_cool_capacity, 0.0, 1.0);
}

Field init_weight_field(const Field& over, WeightKind f_init, double lin_slope) {
    if (binarize(over, 0.0).count() == 0)
        throw ValidationError("initial-overflow term needs a non-empty over mask");
    Field depth = target_depth(over);
    const double max_dist = std::max(over.width, over.height) / 2.0;
    Field weights(over.width, over.height);
    for (std::size_t i = 0; i < depth.values.size(); ++i) {
        const double d = std::min(depth.values[i], max_dist) / max_dist;
        weights.values[i] = apply_weighting(f_init, d, lin_slope);
    }
    return weights;
}

double initial_overflow_term(const BitField& dispensed, const Field& weights) {
    double total = 0.0;
    for (const double w : weights.values) total += w;
    if (total <= 0.0) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < dispensed.bits.size(); ++i)
        if (dispensed.bits[i]) sum += weights.values[i];
    return sum / total;
}

namespace {

// Labeling only the bounding box of the set pixels is topologically identical
// to labeling the whole (possibly huge) fine grid: everything outside the box
// is empty and thus part of the outside component.
VoidStats enclosed_voids_cropped(const BitField& occupancy) {
    int x0 = occupancy.width, y0 = occupancy.height, x1 = -1, y1 = -1;
    for (int y = 0; y < occupancy.height; ++y) {
        for (int x = 0; x < occupancy.width; ++x) {
            if (!occupancy.at(x, y)) continue;
            x0 = std::min(x0, x);
            y0 = std::min(y0, y);
            x1 = std::max(x1, x);
            y1 = std::max(y1, y);
        }
    }
    if (x1 < 0) return {};
    BitField crop(x1 - x0 + 1, y1 - y0 + 1);
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) crop.at(x - x0, y - y0) = occupancy.at(x, y);
    return enclosed_voids(crop);
}

}  // namespace

VoidLosses void_losses(const BitField& fine_occupancy, int fine_scale,
                       const std::vector<FlowSnapshot>& snapshots, double cool_capacity,
                       double cell_area, WeightKind f_con, double lin_slope,
                       std::vector<SnapshotStats>* stats_out) {
    if (!(cool_capacity > 0.0))
        throw ValidationError("void_losses: cooling capacity must be > 0");
    VoidLosses out;

    const VoidStats initial = enclosed_voids_cropped(fine_occupancy);
    out.init_void_count = initial.count;
    out.init_void_area_cells =
        static_cast<double>(initial.area) / (static_cast<double>(fine_scale) * fine_scale);
    if (initial.count > 0) {
        out.bin_init = 1.0;
        const double norm = std::min(out.init_void_area_cells / cool_capacity, 1.0);
        out.area_init = apply_weighting(f_con, norm, lin_slope);
    }

    bool found = false;
    for (const FlowSnapshot& snap : snapshots) {
        const double threshold = kCoverThreshold * snap.gap * cell_area;
        BitField covered(snap.state.width, snap.state.height);
        for (std::size_t i = 0; i < snap.state.amounts.size(); ++i)
            covered.bits[i] = snap.state.amounts[i] > threshold ? 1 : 0;
        const VoidStats stats = enclosed_voids_cropped(covered);
        if (stats_out)
            stats_out->push_back({snap.gap, stats.count, static_cast<double>(stats.area)});
        if (!found && stats.count > 0) {
            found = true;
            out.first_void_gap = snap.gap;
            out.med_void_area_cells = static_cast<double>(stats.area);
            out.bin_med = 1.0;
            const double norm = std::min(out.med_void_area_cells / cool_capacity, 1.0);
            out.area_med = apply_weighting(f_con, norm, lin_slope);
        }
    }
    return out;
}

double recombine_total(const EvaluationReport& report, const ObjectiveConfig& config) {
    return config.w_comp_cool * report.l_comp_cool + config.w_comp_over * report.l_comp_over +
           config.w_comp_tab * report.l_comp_tab + config.w_init_over * report.l_init_over +
           config.w_void_bin * report.l_void_bin_init + config.w_void_bin * report.l_void_bin_med +
           config.w_void_area * report.l_void_area_init +
           config.w_void_area * report.l_void_area_med;
}

Evaluator::Evaluator(Product product, ObjectiveConfig config, GapSpec gap, bool tolerance_mode,
                     RasterSettings raster, FlowSettings flow)
    : product_(std::move(product)),
      config_(config),
      gap_(gap),
      tolerance_mode_(tolerance_mode),
      raster_(raster),
      flow_(flow) {
    validate_product(product_);
    validate_config(config_);
    validate_gap(gap_);
    if (raster_.fine_scale < 1) throw ValidationError("fine_scale must be >= 1");
    if (!(raster_.bead_width > 0.0)) throw ValidationError("bead_width must be > 0");

    cool_capacity_ = product_.areas.cool.sum();
    required_volume_ = total_required_volume(product_.areas, gap_, product_.cell_size);

    use_area_strategy_ = config_.f_area != WeightKind::con;
    if (use_area_strategy_) {
        const double max_depth = target_depth(product_.areas.cool).max();
        area_w_cool_ = area_weight_field(product_.areas.cool, max_depth, config_.f_area,
                                         config_.lin_slope);
        area_w_over_ = area_weight_field(product_.areas.over, max_depth, config_.f_area,
                                         config_.lin_slope);
        area_w_tab_ = area_weight_field(product_.areas.tab, max_depth, config_.f_area,
                                        config_.lin_slope);
        weighted_cool_capacity_ = area_w_cool_.sum();
    }
    has_init_term_ = config_.f_init != WeightKind::none;
    if (has_init_term_)
        init_weights_ = init_weight_field(product_.areas.over, config_.f_init, config_.lin_slope);
}

GapReport Evaluator::evaluate_gap(const MaterialGrid& state, double gap_height) const {
    GapReport report;
    report.gap = gap_height;
    const Field m_comp = normalize_compressed(state, gap_height);
    const BitField covered = binarize(m_comp, kCoverThreshold);

    if (use_area_strategy_) {
        report.l_comp_cool = coverage_area_term(covered, area_w_cool_, weighted_cool_capacity_);
        report.l_comp_over = coverage_area_term(covered, area_w_over_, weighted_cool_capacity_);
        report.l_comp_tab = coverage_area_term(covered, area_w_tab_, weighted_cool_capacity_);
    } else {
        report.l_comp_cool = coverage_flat_term(m_comp, product_.areas.cool, cool_capacity_,
                                                config_.f_con, true, config_.lin_slope);
        report.l_comp_over = coverage_flat_term(m_comp, product_.areas.over, cool_capacity_,
                                                config_.f_con, false, config_.lin_slope);
        report.l_comp_tab = coverage_flat_term(m_comp, product_.areas.tab, cool_capacity_,
                                               config_.f_con, false, config_.lin_slope);
    }

    double cover = 0.0, taboo = 0.0, v_in = 0.0, v_out = 0.0;
    for (std::size_t i = 0; i < m_comp.values.size(); ++i) {
        const double cool = product_.areas.cool.values[i];
        cover += m_comp.values[i] * cool;
        if (covered.bits[i]) taboo += product_.areas.tab.values[i];
        v_in += state.amounts[i] * cool;
        v_out += state.amounts[i] * (1.0 - cool);
    }
    v_out += state.offgrid_sink;
    report.coverage_fraction = std::min(cover / cool_capacity_, 1.0);
    report.taboo_violation_fraction = taboo / cool_capacity_;
    if (v_in > 0.0) report.overflow_ratio = v_out / v_in;
    else report.overflow_ratio = v_out > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return report;
}

EvaluationReport Evaluator::evaluate(const DispensePath& path) const {
    validate_path(path);
    EvaluationReport report;
    report.coverage_strategy = use_area_strategy_ ? "area" : "flat";

    MaterialGrid initial =
        rasterize_coarse(path, product_.grid_width, product_.grid_height, product_.cell_size);
    const BitField fine =
        rasterize_fine(path, product_.grid_width, product_.grid_height, raster_);

    // dispensed footprint for the initial-overflow term, thresholded against
    // dust relative to the nominal gap
    BitField dispensed(initial.width, initial.height);
    const double init_threshold = kCoverThreshold * gap_.g_final * initial.cell_area();
    for (std::size_t i = 0; i < initial.amounts.size(); ++i)
        dispensed.bits[i] = initial.amounts[i] > init_threshold ? 1 : 0;

    std::vector<FlowSnapshot> all_snapshots;
    if (tolerance_mode_) {
        auto [trace_max, trace_min] = compress_two_stage(initial, gap_, flow_);
        report.gaps.push_back(evaluate_gap(trace_max.final_state(), gap_.g_max));
        report.gaps.push_back(evaluate_gap(trace_min.final_state(), gap_.g_min));
        all_snapshots = std::move(trace_max.snapshots);
        for (FlowSnapshot& snap : trace_min.snapshots)
            all_snapshots.push_back(std::move(snap));
        report.final_state = all_snapshots.back().state;
    } else {
        FlowTrace trace = compress(initial, gap_, gap_.g_final, flow_);
        report.gaps.push_back(evaluate_gap(trace.final_state(), gap_.g_final));
        all_snapshots = std::move(trace.snapshots);
        report.final_state = all_snapshots.back().state;
    }

    for (const GapReport& gap_report : report.gaps) {
        report.l_comp_cool += gap_report.l_comp_cool;
        report.l_comp_over += gap_report.l_comp_over;
        report.l_comp_tab += gap_report.l_comp_tab;
    }

    if (has_init_term_)
        report.l_init_over = initial_overflow_term(dispensed, init_weights_);

    const VoidLosses voids =
        void_losses(fine, raster_.fine_scale, all_snapshots, cool_capacity_,
                    initial.cell_area(), config_.f_con, config_.lin_slope, &report.snapshots);
    report.l_void_bin_init = voids.bin_init;
    report.l_void_bin_med = voids.bin_med;
    report.l_void_area_init = voids.area_init;
    report.l_void_area_med = voids.area_med;

    report.coverage_fraction = report.gaps.front().coverage_fraction;
    report.overflow_ratio = report.gaps.back().overflow_ratio;
    report.taboo_violation_fraction = report.gaps.back().taboo_violation_fraction;
    report.void_area_fraction =
        std::max(voids.init_void_area_cells, voids.med_void_area_cells) / cool_capacity_;

    report.initial = std::move(initial);
    report.total_loss = recombine_total(report, config_);
    return report;
}

EvaluationReport total_loss(const DispensePath& path, const Product& product,
                            const ObjectiveConfig& config, const GapSpec& gap,
                            bool tolerance_mode, const RasterSettings& raster,
                            const FlowSettings& flow) {
    return Evaluator(product, config, gap, tolerance_mode, raster, flow).evaluate(path);
}

}  // namespace timflow
