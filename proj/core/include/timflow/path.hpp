#pragma once

#include <cstddef>
#include <vector>

namespace timflow {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Vec2&) const = default;
};

/// Polyline travelled by the dispense head, in grid units (continuous, not
/// cell-snapped), plus the constant volumetric feedrate along it.
///
/// feedrate is volume per grid unit of travel, so the dispensed total is
/// feedrate * polyline_length(points).
///
/// frozen is a per-scalar-coordinate mask, flattened [x0, y0, x1, y1, ...];
/// marked coordinates are pinned and must survive any optimizer step
/// bit-identically. Empty means nothing is frozen.
struct DispensePath {
    std::vector<Vec2> points;
    double feedrate = 0.0;
    std::vector<bool> frozen;

    std::size_t segment_count() const { return points.empty() ? 0 : points.size() - 1; }
    bool coordinate_frozen(std::size_t flat_index) const {
        return flat_index < frozen.size() && frozen[flat_index];
    }

    bool operator==(const DispensePath&) const = default;
};

/// Sum of segment lengths, in grid units.
double polyline_length(const std::vector<Vec2>& points);

/// Feedrate that makes the path dispense exactly required_volume.
/// Throws ValidationError for a zero-length polyline.
double feedrate_for_path(const std::vector<Vec2>& points, double required_volume);

/// Throws ValidationError unless the path has >= 2 points and, when a frozen
/// mask is present, the mask covers exactly 2 * points.size() coordinates.
void validate_path(const DispensePath& path);

}  // namespace timflow
