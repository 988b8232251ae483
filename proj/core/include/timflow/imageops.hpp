#pragma once

#include <cstdint>
#include <vector>

#include "timflow/grid.hpp"

namespace timflow {

enum class Connectivity { four = 4, eight = 8 };

/// Result of labeling the set cells of a mask. Label 0 is the background
/// (unset cells); set-cell components get contiguous labels 1..component_count.
/// component_areas[k] is the cell count of label k (index 0 = background), so
/// the areas always sum to width * height.
struct LabeledComponents {
    int width = 0;
    int height = 0;
    std::vector<std::int32_t> label_map;
    std::vector<std::int64_t> component_areas;
    int component_count = 0;
};

struct VoidStats {
    int count = 0;             ///< enclosed background pockets
    std::int64_t area = 0;     ///< their summed area in cells
};

/// Exact squared Euclidean distance (cell-center metric) from every cell to
/// the nearest set cell; set cells map to 0. Throws ValidationError when the
/// mask has no set cell (distance undefined).
std::vector<std::int64_t> distance_transform_squared(const BitField& mask);

/// sqrt of distance_transform_squared, as a Field.
Field distance_transform(const BitField& mask);

/// Two-pass union-find labeling of the set cells under the given connectivity.
LabeledComponents connected_components(const BitField& mask, Connectivity connectivity);

/// Enclosed-pocket detection: label the complement of occupancy 4-connected
/// after padding with a one-cell empty border; the border-touching component
/// is the outside, everything else is a void. Padding cells are not counted
/// in the area.
VoidStats enclosed_voids(const BitField& occupancy);

}  // namespace timflow
