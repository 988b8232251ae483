#pragma once

#include <string>

#include "timflow/grid.hpp"

namespace timflow {

/// Co-registered grayscale masks defining what the finished layer should look
/// like. Values in [0, 1]; a fractional value means the cell is only partially
/// assigned to that area type (sub-cell boundary resolution).
struct TargetAreas {
    Field cool;  ///< surface that must end up covered
    Field over;  ///< permissible but wasteful spill region
    Field tab;   ///< forbidden zones; any contact is a failure

    bool operator==(const TargetAreas&) const = default;
};

/// Joining-gap geometry. Heights in length units (same unit as cell_size).
struct GapSpec {
    double g_final = 1.0;  ///< nominal gap after joining
    double g_max = 1.0;    ///< upper mechanical tolerance
    double g_min = 1.0;    ///< lower mechanical tolerance
    int n_steps = 10;      ///< discrete gap levels per compression run

    bool operator==(const GapSpec&) const = default;
};

/// A complete product definition: grid geometry, target areas, gap spec.
struct Product {
    std::string name;
    int grid_width = 50;
    int grid_height = 50;
    double cell_size = 1.0;
    TargetAreas areas;
    GapSpec gap;

    bool operator==(const Product&) const = default;
};

/// Throws ValidationError unless 0 < g_min <= g_final <= g_max and n_steps >= 1.
void validate_gap(const GapSpec& gap);

/// Throws ValidationError on: non-positive dims/cell_size, mask dimension
/// mismatch, mask value outside [0,1] (reported with its cell index), empty
/// cooling mask, or an inconsistent gap spec.
void validate_product(const Product& product);

/// Volume that covers exactly 100 % of the cooling surface at the final gap:
/// sum(cool) * cell_size^2 * g_final.
double total_required_volume(const TargetAreas& areas, const GapSpec& gap, double cell_size);

}  // namespace timflow
