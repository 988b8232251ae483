#pragma once

#include <string>
#include <vector>

#include "timflow/flow.hpp"
#include "timflow/grid.hpp"
#include "timflow/path.hpp"
#include "timflow/product.hpp"
#include "timflow/raster.hpp"

namespace timflow {

/// Cell-level weighting functions selectable in the objective:
/// none: 0, con: x, lin: slope*x, squ: x^2, log: -ln(1 - min(x, 1 - 1e-6)).
/// The log clamp avoids the singularity at x = 1.
enum class WeightKind { none, con, lin, squ, log };

double apply_weighting(WeightKind kind, double x, double lin_slope = 1.0);

/// Term weights and weighting-function selectors of the scalar objective.
/// Defaults are the combination that proved strongest overall: void area
/// (not the binary flag) penalized, a high initial-overflow weight, log
/// shaping for the summed coverage terms.
struct ObjectiveConfig {
    double w_comp_cool = 0.0;
    double w_comp_over = 1.0;
    double w_comp_tab = 100.0;
    double w_init_over = 1000.0;
    double w_void_bin = 0.0;
    double w_void_area = 100.0;
    WeightKind f_con = WeightKind::log;   ///< {con, log}: shapes summed coverage + void area
    WeightKind f_area = WeightKind::con;  ///< {con, lin, squ, log}: con selects the flat strategy
    WeightKind f_init = WeightKind::log;  ///< {none, lin, log}: initial-overflow shaping
    double lin_slope = 1.0;

    bool operator==(const ObjectiveConfig&) const = default;
};

/// Throws ValidationError on negative weights or selector values outside the
/// allowed sets (f_con in {con, log}, f_area in {con, lin, squ, log}, f_init
/// in {none, lin, log}).
void validate_config(const ObjectiveConfig& config);

/// Binarization threshold for "covered" cells; masks floating-point dust from
/// the flow relaxation.
inline constexpr double kCoverThreshold = 1e-6;

/// Penetration depth of each cell into the support (> 0 cells) of a grayscale
/// target mask: Euclidean distance to the nearest cell outside the support,
/// 0 outside it. Throws ValidationError when the support covers the whole
/// grid (no outside exists); an empty support yields an all-zero field.
Field target_depth(const Field& target);

/// Flat coverage strategy: the target-masked material sum, normalized by the
/// cooling capacity and clipped to 1; the cooling term scores the *uncovered*
/// remainder f(1 - c), other targets score f(c). cool_capacity must come from
/// the cooling mask (explicit parameter, shared across the three calls).
double coverage_flat_term(const Field& m_comp, const Field& target, double cool_capacity,
                          WeightKind f_con, bool cooling_target, double lin_slope = 1.0);

/// Distance-weighted coverage strategy, split in two to let callers reuse the
/// weight fields across many evaluations:
/// area_weight_field turns a target mask into per-cell weights
/// f(min(depth, max_depth_cool) / max_depth_cool); coverage_area_term sums
/// the weights over covered cells, normalizes by the weighted cooling
/// capacity (sum of the cooling weight field) and clips to [0, 1].
Field area_weight_field(const Field& target, double max_depth_cool, WeightKind f_area,
                        double lin_slope = 1.0);
double coverage_area_term(const BitField& covered, const Field& weights,
                          double weighted_cool_capacity);

/// Weight field for the initial-overflow term: depth into the over-area
/// support, clipped at half the larger grid dimension, normalized, shaped by
/// f_init. Throws ValidationError for an empty over mask.
Field init_weight_field(const Field& over, WeightKind f_init, double lin_slope = 1.0);

/// Initial-overflow term: weighted fraction of the dispensed footprint,
/// normalized by the total weight mass (<= 1 by construction).
double initial_overflow_term(const BitField& dispensed, const Field& weights);

/// Void terms of one evaluation.
struct VoidLosses {
    double bin_init = 0.0;
    double area_init = 0.0;
    double bin_med = 0.0;
    double area_med = 0.0;
    int init_void_count = 0;
    double init_void_area_cells = 0.0;   ///< in coarse-cell units
    double med_void_area_cells = 0.0;    ///< at the first snapshot with a void
    double first_void_gap = -1.0;        ///< gap level of that snapshot, -1 if none
};

/// Loss terms and statistics at one evaluated gap height.
struct GapReport {
    double gap = 0.0;
    double l_comp_cool = 0.0;
    double l_comp_over = 0.0;
    double l_comp_tab = 0.0;
    double coverage_fraction = 0.0;
    double overflow_ratio = 0.0;
    double taboo_violation_fraction = 0.0;

    bool operator==(const GapReport&) const = default;
};

struct SnapshotStats {
    double gap = 0.0;
    int void_count = 0;
    double void_area_cells = 0.0;

    bool operator==(const SnapshotStats&) const = default;
};

/// Initial voids from the fine occupancy (areas rescaled to coarse cells by
/// fine_scale^2); intermediate voids from the first snapshot whose binarized
/// cover encloses a pocket (areas are not aggregated across later snapshots).
/// Both area terms are normalized by the cooling capacity, clipped to 1 and
/// shaped by f_con. stats_out, when given, receives one entry per snapshot.
VoidLosses void_losses(const BitField& fine_occupancy, int fine_scale,
                       const std::vector<FlowSnapshot>& snapshots, double cool_capacity,
                       double cell_area, WeightKind f_con, double lin_slope = 1.0,
                       std::vector<SnapshotStats>* stats_out = nullptr);

/// Everything one path evaluation produced. total_loss is always the exact
/// weighted sum of the eight term fields. In tolerance mode the three
/// coverage terms are sums over both evaluated gaps (see `gaps` for the
/// per-gap split), coverage_fraction is reported at the larger gap and
/// overflow/taboo at the smaller one - the binding sides of the trade-off.
struct EvaluationReport {
    double total_loss = 0.0;
    double l_comp_cool = 0.0;
    double l_comp_over = 0.0;
    double l_comp_tab = 0.0;
    double l_init_over = 0.0;
    double l_void_bin_init = 0.0;
    double l_void_bin_med = 0.0;
    double l_void_area_init = 0.0;
    double l_void_area_med = 0.0;

    double coverage_fraction = 0.0;
    double overflow_ratio = 0.0;
    double taboo_violation_fraction = 0.0;
    double void_area_fraction = 0.0;     ///< max of initial/intermediate, vs cooling area

    std::string coverage_strategy;       ///< "flat" or "area"
    std::vector<GapReport> gaps;
    std::vector<SnapshotStats> snapshots;
    MaterialGrid initial;
    MaterialGrid final_state;

    bool operator==(const EvaluationReport&) const = default;
};

/// Recombine the eight stored terms with the config weights - the defining
/// identity of total_loss.
double recombine_total(const EvaluationReport& report, const ObjectiveConfig& config);

/// One fully-configured objective. Construction validates the inputs and
/// precomputes every path-independent field (distance weights, capacities),
/// so evaluate() is cheap and safe to call from many threads at once.
class Evaluator {
public:
    Evaluator(Product product, ObjectiveConfig config, GapSpec gap, bool tolerance_mode,
              RasterSettings raster = {}, FlowSettings flow = {});

    /// Rasterize, compress and score one path. The path's feedrate is used
    /// as-is; see feedrate_for_path / required_volume for sizing it.
    EvaluationReport evaluate(const DispensePath& path) const;

    double required_volume() const { return required_volume_; }
    const Product& product() const { return product_; }
    const ObjectiveConfig& config() const { return config_; }
    const GapSpec& gap() const { return gap_; }
    bool tolerance_mode() const { return tolerance_mode_; }
    const RasterSettings& raster_settings() const { return raster_; }

private:
    GapReport evaluate_gap(const MaterialGrid& state, double gap_height) const;

    Product product_;
    ObjectiveConfig config_;
    GapSpec gap_;
    bool tolerance_mode_ = false;
    RasterSettings raster_;
    FlowSettings flow_;

    double cool_capacity_ = 0.0;
    double required_volume_ = 0.0;
    bool use_area_strategy_ = false;
    Field area_w_cool_, area_w_over_, area_w_tab_;
    double weighted_cool_capacity_ = 0.0;
    Field init_weights_;
    bool has_init_term_ = false;
};

/// One-shot evaluation (builds a temporary Evaluator).
EvaluationReport total_loss(const DispensePath& path, const Product& product,
                            const ObjectiveConfig& config, const GapSpec& gap,
                            bool tolerance_mode, const RasterSettings& raster = {},
                            const FlowSettings& flow = {});

}  // namespace timflow
