#pragma once

#include "timflow/path.hpp"
#include "timflow/product.hpp"

namespace timflow::fixtures {

// Synthetic demo geometries. These are hand-designed stand-ins, not real
// product definitions; masks follow the usual convention over = 1 - cool,
// taboo inside over.

/// Centered 30x20 cooling rectangle (600 cells) on a size x size grid, no
/// taboo zones. Nominal gap 1.
Product rectangle(int size = 50);

/// L-shaped cooling surface, no taboo zones.
Product lshape(int size = 50);

/// 40x28 cooling rectangle with two 3x3 taboo islands punched into it.
Product taboo_islands(int size = 50);

/// Cooling rectangle in the upper half, a full-width taboo strip below it;
/// gap tolerance g_min = g_max / 2 for tolerance-mode runs.
Product border_taboo(int size = 50);

/// Hand-drawn 5-segment serpentine over the rectangle fixture's cooling
/// surface; feedrate left at 0 for the caller to calibrate.
DispensePath rectangle_serpentine();

}  // namespace timflow::fixtures
