#include "timflow/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "timflow/errors.hpp"

namespace timflow {

namespace {

// Parametric split positions of segment a->b at every integer grid line,
// including t = 0 and t = 1, sorted ascending.
void crossing_params(const Vec2& a, const Vec2& b, std::vector<double>& ts) {
    ts.clear();
    ts.push_back(0.0);
    ts.push_back(1.0);
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    auto add_axis = [&](double p0, double d) {
        if (d == 0.0) return;
        const double lo = std::min(p0, p0 + d);
        const double hi = std::max(p0, p0 + d);
        for (double k = std::ceil(lo); k <= hi; k += 1.0) {
            const double t = (k - p0) / d;
            if (t > 0.0 && t < 1.0) ts.push_back(t);
        }
    };
    add_axis(a.x, dx);
    add_axis(a.y, dy);
    std::sort(ts.begin(), ts.end());
}

// For each cell of a segment's split, call fn(cell_x, cell_y, sub_length).
template <typename Fn>
void for_each_crossed_cell(const Vec2& a, const Vec2& b, std::vector<double>& scratch, Fn&& fn) {
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double seg_len = std::hypot(dx, dy);
    if (seg_len == 0.0) return;
    crossing_params(a, b, scratch);
    for (std::size_t i = 1; i < scratch.size(); ++i) {
        const double dt = scratch[i] - scratch[i - 1];
        if (dt <= 0.0) continue;
        const double tm = 0.5 * (scratch[i] + scratch[i - 1]);
        const int cx = static_cast<int>(std::floor(a.x + tm * dx));
        const int cy = static_cast<int>(std::floor(a.y + tm * dy));
        fn(cx, cy, seg_len * dt);
    }
}

// Liang-Barsky: parametric range of segment a->b inside
// [x_min, x_max] x [y_min, y_max]. Keeps the crossing sweeps proportional to
// the grid instead of the (unbounded) candidate coordinates.
bool clip_to_box(const Vec2& a, const Vec2& b, double x_min, double x_max, double y_min,
                 double y_max, double& t0, double& t1) {
    t0 = 0.0;
    t1 = 1.0;
    const double d[2] = {b.x - a.x, b.y - a.y};
    const double lo[2] = {x_min - a.x, y_min - a.y};
    const double hi[2] = {x_max - a.x, y_max - a.y};
    for (int axis = 0; axis < 2; ++axis) {
        if (d[axis] == 0.0) {
            if (lo[axis] > 0.0 || hi[axis] < 0.0) return false;
            continue;
        }
        double enter = lo[axis] / d[axis];
        double leave = hi[axis] / d[axis];
        if (enter > leave) std::swap(enter, leave);
        t0 = std::max(t0, enter);
        t1 = std::min(t1, leave);
        if (t0 > t1) return false;
    }
    return true;
}

Vec2 lerp(const Vec2& a, const Vec2& b, double t) {
    return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
}

}  // namespace

MaterialGrid rasterize_coarse(const DispensePath& path, int width, int height,
                              double cell_size) {
    validate_path(path);
    MaterialGrid grid(width, height, cell_size);
    std::vector<double> scratch;
    for (std::size_t i = 1; i < path.points.size(); ++i) {
        const Vec2& a = path.points[i - 1];
        const Vec2& b = path.points[i];
        const double seg_len = std::hypot(b.x - a.x, b.y - a.y);
        if (seg_len == 0.0) continue;

        double t0, t1;
        if (!clip_to_box(a, b, 0.0, width, 0.0, height, t0, t1)) {
            grid.offgrid_sink += path.feedrate * seg_len;
            continue;
        }
        if (t0 > 0.0) grid.offgrid_sink += path.feedrate * seg_len * t0;
        if (t1 < 1.0) grid.offgrid_sink += path.feedrate * seg_len * (1.0 - t1);
        const Vec2 ca = t0 == 0.0 ? a : lerp(a, b, t0);
        const Vec2 cb = t1 == 1.0 ? b : lerp(a, b, t1);
        for_each_crossed_cell(ca, cb, scratch, [&](int cx, int cy, double len) {
            const double volume = path.feedrate * len;
            if (grid.in_bounds(cx, cy)) grid.at(cx, cy) += volume;
            else grid.offgrid_sink += volume;
        });
    }
    return grid;
}

namespace {

// Set every pixel of column px whose center lies within r of segment a->b.
// The capsule is convex, so the hit set per column is a single y-interval;
// it is the union of the band piece (projection within the segment) and the
// two end disks.
void stamp_column(BitField& out, int px, const Vec2& a, const Vec2& b, double r) {
    const double cx = px + 0.5;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    for (const Vec2& c : {a, b}) {
        const double off = cx - c.x;
        if (std::abs(off) <= r) {
            const double e = std::sqrt(r * r - off * off);
            lo = std::min(lo, c.y - e);
            hi = std::max(hi, c.y + e);
        }
    }

    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    if (len2 > 0.0) {
        const double rl = r * std::sqrt(len2);
        double blo = -std::numeric_limits<double>::infinity();
        double bhi = std::numeric_limits<double>::infinity();
        bool empty = false;

        // |(cx-ax)*dy - (y-ay)*dx| <= r * len
        const double c0 = (cx - a.x) * dy;
        if (dx != 0.0) {
            double y1 = a.y + (c0 - rl) / dx;
            double y2 = a.y + (c0 + rl) / dx;
            if (y1 > y2) std::swap(y1, y2);
            blo = std::max(blo, y1);
            bhi = std::min(bhi, y2);
        } else if (std::abs(cx - a.x) > r) {
            empty = true;
        }

        // projection parameter within [0, 1]: 0 <= (cx-ax)*dx + (y-ay)*dy <= len2
        const double c1 = (cx - a.x) * dx;
        if (dy != 0.0) {
            double y1 = a.y + (0.0 - c1) / dy;
            double y2 = a.y + (len2 - c1) / dy;
            if (y1 > y2) std::swap(y1, y2);
            blo = std::max(blo, y1);
            bhi = std::min(bhi, y2);
        } else if (c1 < 0.0 || c1 > len2) {
            empty = true;
        }

        if (!empty && blo <= bhi) {
            lo = std::min(lo, blo);
            hi = std::max(hi, bhi);
        }
    }

    if (lo > hi) return;
    int y0 = static_cast<int>(std::ceil(lo - 0.5));
    int y1 = static_cast<int>(std::floor(hi - 0.5));
    y0 = std::max(y0, 0);
    y1 = std::min(y1, out.height - 1);
    for (int py = y0; py <= y1; ++py) out.at(px, py) = 1;
}

}  // namespace

BitField rasterize_fine(const DispensePath& path, int width, int height,
                        const RasterSettings& settings) {
    validate_path(path);
    if (settings.fine_scale < 1)
        throw ValidationError("fine_scale must be >= 1");
    if (!(settings.bead_width > 0.0))
        throw ValidationError("bead_width must be > 0");

    const int s = settings.fine_scale;
    BitField out(width * s, height * s);
    const double r = settings.bead_width * s / 2.0;

    std::vector<double> scratch;
    for (std::size_t i = 1; i < path.points.size(); ++i) {
        const Vec2 full_a{path.points[i - 1].x * s, path.points[i - 1].y * s};
        const Vec2 full_b{path.points[i].x * s, path.points[i].y * s};

        // centerline farther than r+1 outside the image cannot light a pixel
        double t0, t1;
        if (!clip_to_box(full_a, full_b, -(r + 1.0), out.width + r + 1.0, -(r + 1.0),
                         out.height + r + 1.0, t0, t1))
            continue;
        const Vec2 a = t0 == 0.0 ? full_a : lerp(full_a, full_b, t0);
        const Vec2 b = t1 == 1.0 ? full_b : lerp(full_a, full_b, t1);

        int x0 = static_cast<int>(std::floor(std::min(a.x, b.x) - r)) - 1;
        int x1 = static_cast<int>(std::ceil(std::max(a.x, b.x) + r)) + 1;
        x0 = std::max(x0, 0);
        x1 = std::min(x1, out.width - 1);
        for (int px = x0; px <= x1; ++px) stamp_column(out, px, a, b, r);

        // the centerline's own pixels, so a zero-width numerical corner case
        // can never disconnect the footprint
        for_each_crossed_cell(a, b, scratch, [&](int cx, int cy, double) {
            if (out.in_bounds(cx, cy)) out.at(cx, cy) = 1;
        });
    }
    return out;
}

}  // namespace timflow
