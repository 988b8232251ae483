#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace oracles {

using namespace timflow;

std::vector<std::int64_t> brute_force_distance_sq(const BitField& mask) {
    const int w = mask.width, h = mask.height;
    std::vector<std::int64_t> out(static_cast<std::size_t>(w) * h,
                                  std::numeric_limits<std::int64_t>::max());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::int64_t best = std::numeric_limits<std::int64_t>::max();
            for (int sy = 0; sy < h; ++sy) {
                for (int sx = 0; sx < w; ++sx) {
                    if (!mask.at(sx, sy)) continue;
                    const std::int64_t dx = x - sx, dy = y - sy;
                    best = std::min(best, dx * dx + dy * dy);
                }
            }
            out[static_cast<std::size_t>(y) * w + x] = best;
        }
    }
    return out;
}

LabeledComponents flood_fill_components(const BitField& mask, Connectivity connectivity) {
    const int w = mask.width, h = mask.height;
    LabeledComponents result;
    result.width = w;
    result.height = h;
    result.label_map.assign(static_cast<std::size_t>(w) * h, 0);
    result.component_areas.assign(1, 0);

    const bool diag = connectivity == Connectivity::eight;
    std::vector<std::pair<int, int>> stack;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask.at(x, y) || result.label_map[static_cast<std::size_t>(y) * w + x] != 0)
                continue;
            const std::int32_t label = ++result.component_count;
            result.component_areas.push_back(0);
            stack.push_back({x, y});
            result.label_map[static_cast<std::size_t>(y) * w + x] = label;
            while (!stack.empty()) {
                const auto [cx, cy] = stack.back();
                stack.pop_back();
                ++result.component_areas[static_cast<std::size_t>(label)];
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        if (!diag && dx != 0 && dy != 0) continue;
                        const int nx = cx + dx, ny = cy + dy;
                        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                        if (!mask.at(nx, ny)) continue;
                        auto& cell = result.label_map[static_cast<std::size_t>(ny) * w + nx];
                        if (cell == 0) {
                            cell = label;
                            stack.push_back({nx, ny});
                        }
                    }
                }
            }
        }
    }
    std::int64_t background = 0;
    for (const std::int32_t l : result.label_map)
        if (l == 0) ++background;
    result.component_areas[0] = background;
    return result;
}

VoidStats flood_fill_voids(const BitField& occupancy) {
    const int w = occupancy.width, h = occupancy.height;
    BitField complement(w, h);
    for (std::size_t i = 0; i < occupancy.bits.size(); ++i)
        complement.bits[i] = occupancy.bits[i] ? 0 : 1;
    const LabeledComponents labels = flood_fill_components(complement, Connectivity::four);

    std::vector<std::uint8_t> border(labels.component_areas.size(), 0);
    for (int x = 0; x < w; ++x) {
        border[static_cast<std::size_t>(labels.label_map[static_cast<std::size_t>(x)])] = 1;
        border[static_cast<std::size_t>(
            labels.label_map[static_cast<std::size_t>(h - 1) * w + x])] = 1;
    }
    for (int y = 0; y < h; ++y) {
        border[static_cast<std::size_t>(labels.label_map[static_cast<std::size_t>(y) * w])] = 1;
        border[static_cast<std::size_t>(
            labels.label_map[static_cast<std::size_t>(y) * w + w - 1])] = 1;
    }
    VoidStats stats;
    for (std::int32_t l = 1; l <= labels.component_count; ++l) {
        if (border[static_cast<std::size_t>(l)]) continue;
        ++stats.count;
        stats.area += labels.component_areas[static_cast<std::size_t>(l)];
    }
    return stats;
}

bool same_partition(const std::vector<std::int32_t>& a, const std::vector<std::int32_t>& b) {
    if (a.size() != b.size()) return false;
    std::map<std::int32_t, std::int32_t> a_to_b, b_to_a;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto [ita, inserted_a] = a_to_b.insert({a[i], b[i]});
        if (!inserted_a && ita->second != b[i]) return false;
        const auto [itb, inserted_b] = b_to_a.insert({b[i], a[i]});
        if (!inserted_b && itb->second != a[i]) return false;
    }
    return true;
}

MaterialGrid sampled_raster(const DispensePath& path, int width, int height, double cell_size,
                            int samples_per_segment) {
    MaterialGrid grid(width, height, cell_size);
    for (std::size_t i = 1; i < path.points.size(); ++i) {
        const Vec2 a = path.points[i - 1];
        const Vec2 b = path.points[i];
        const double len = std::hypot(b.x - a.x, b.y - a.y);
        if (len == 0.0) continue;
        const double slice = path.feedrate * len / samples_per_segment;
        for (int s = 0; s < samples_per_segment; ++s) {
            const double t = (s + 0.5) / samples_per_segment;
            const int cx = static_cast<int>(std::floor(a.x + t * (b.x - a.x)));
            const int cy = static_cast<int>(std::floor(a.y + t * (b.y - a.y)));
            if (grid.in_bounds(cx, cy)) grid.at(cx, cy) += slice;
            else grid.offgrid_sink += slice;
        }
    }
    return grid;
}

BitField random_mask(std::mt19937& rng, int width, int height, double fill_probability) {
    BitField mask(width, height);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& bit : mask.bits) bit = u(rng) < fill_probability ? 1 : 0;
    return mask;
}

DispensePath random_path(std::mt19937& rng, int width, int height, int n_segments,
                         double volume, double margin) {
    std::uniform_real_distribution<double> ux(margin, width - margin);
    std::uniform_real_distribution<double> uy(margin, height - margin);
    DispensePath path;
    for (int i = 0; i <= n_segments; ++i) path.points.push_back({ux(rng), uy(rng)});
    path.feedrate = feedrate_for_path(path.points, volume);
    return path;
}

}  // namespace oracles
