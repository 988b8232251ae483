#include "timflow/path.hpp"

#include <cmath>

#include "timflow/errors.hpp"

namespace timflow {

double polyline_length(const std::vector<Vec2>& points) {
    double total = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i)
        total += std::hypot(points[i].x - points[i - 1].x, points[i].y - points[i - 1].y);
    return total;
}

double feedrate_for_path(const std::vector<Vec2>& points, double required_volume) {
    const double length = polyline_length(points);
    if (length <= 0.0)
        throw ValidationError("feedrate_for_path: polyline has zero length");
    return required_volume / length;
}

void validate_path(const DispensePath& path) {
    if (path.points.size() < 2)
        throw ValidationError("path needs at least 2 points");
    if (!path.frozen.empty() && path.frozen.size() != 2 * path.points.size())
        throw ValidationError("frozen mask must cover every coordinate (2 per point)");
    if (path.feedrate < 0.0)
        throw ValidationError("feedrate must be >= 0");
}

}  // namespace timflow
