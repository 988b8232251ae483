#pragma once

#include "timflow/grid.hpp"
#include "timflow/path.hpp"

namespace timflow {

struct RasterSettings {
    int fine_scale = 20;      ///< upscale factor for the fine occupancy mask
    double bead_width = 1.0;  ///< dispensed bead width, in coarse-grid units
};

/// Deposit the path onto a width x height grid by exact segment-cell clipping:
/// every cell the centerline crosses receives feedrate * (in-cell length in
/// grid units). Geometry outside the grid is legal and deposits into
/// offgrid_sink, so sum(amounts) + offgrid_sink == feedrate * polyline length
/// up to floating-point rounding. Repeated traversals accumulate additively.
MaterialGrid rasterize_coarse(const DispensePath& path, int width, int height,
                              double cell_size);

/// Binary occupancy of the bead footprint at fine resolution
/// (width*fine_scale x height*fine_scale): pixels whose center lies within
/// bead_width/2 of the centerline, plus the pixels the centerline crosses.
/// Used for initial-void detection only; carries no volume.
BitField rasterize_fine(const DispensePath& path, int width, int height,
                        const RasterSettings& settings);

}  // namespace timflow
