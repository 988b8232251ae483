#include "timflow/imageops.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "timflow/errors.hpp"

namespace timflow {

namespace {

constexpr std::int64_t kFar = std::numeric_limits<std::int64_t>::max() / 4;

// Lower envelope of parabolas x -> (x - i)^2 + f(i) (Felzenszwalb/Huttenlocher).
// f holds non-negative integers, kFar marking sources that do not exist; the
// caller guarantees at least one finite entry. Output is the exact pointwise
// min: all quantities stay integral until the (exactly representable)
// intersection abscissae, so no rounding can flip a non-tied comparison.
void envelope_1d(const std::int64_t* f, std::int64_t* out, int n,
                 std::vector<int>& v, std::vector<double>& z) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    v.resize(static_cast<std::size_t>(n) + 1);
    z.resize(static_cast<std::size_t>(n) + 1);
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[q] >= kFar) continue;
        double s = -kInf;
        while (k >= 0) {
            const int p = v[k];
            s = (static_cast<double>(f[q] - f[p]) +
                 static_cast<double>(static_cast<std::int64_t>(q) * q -
                                     static_cast<std::int64_t>(p) * p)) /
                (2.0 * (q - p));
            if (s <= z[k]) {
                --k;
                s = -kInf;
                continue;
            }
            break;
        }
        ++k;
        v[k] = q;
        z[k] = k == 0 ? -kInf : s;
        z[k + 1] = kInf;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
        while (z[j + 1] < q) ++j;
        const std::int64_t d = static_cast<std::int64_t>(q) - v[j];
        out[q] = d * d + f[v[j]];
    }
}

struct UnionFind {
    std::vector<std::int32_t> parent;

    std::int32_t make() {
        parent.push_back(static_cast<std::int32_t>(parent.size()));
        return parent.back();
    }
    std::int32_t find(std::int32_t a) {
        std::int32_t root = a;
        while (parent[root] != root) root = parent[root];
        while (parent[a] != root) {
            const std::int32_t next = parent[a];
            parent[a] = root;
            a = next;
        }
        return root;
    }
    void join(std::int32_t a, std::int32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a < b) parent[b] = a;  // keep the smaller id as root for stable labels
        else parent[a] = b;
    }
};

}  // namespace

std::vector<std::int64_t> distance_transform_squared(const BitField& mask) {
    const int w = mask.width, h = mask.height;
    if (mask.count() == 0)
        throw ValidationError("distance_transform: mask has no set cell");

    // pass 1: per column, 1D distance (in rows) to the nearest set cell
    std::vector<std::int64_t> g(static_cast<std::size_t>(w) * h, kFar);
    for (int x = 0; x < w; ++x) {
        std::int64_t d = kFar;
        for (int y = 0; y < h; ++y) {
            if (mask.at(x, y)) d = 0;
            else if (d < kFar) ++d;
            g[static_cast<std::size_t>(y) * w + x] = d;
        }
        d = kFar;
        for (int y = h - 1; y >= 0; --y) {
            if (mask.at(x, y)) d = 0;
            else if (d < kFar) ++d;
            auto& cell = g[static_cast<std::size_t>(y) * w + x];
            if (d < cell) cell = d;
        }
    }
    for (auto& v : g)
        if (v < kFar) v *= v;

    // pass 2: per row, lower envelope over columns
    std::vector<std::int64_t> out(g.size());
    std::vector<std::int64_t> row_in(w), row_out(w);
    std::vector<int> v;
    std::vector<double> z;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) row_in[x] = g[static_cast<std::size_t>(y) * w + x];
        envelope_1d(row_in.data(), row_out.data(), w, v, z);
        for (int x = 0; x < w; ++x) out[static_cast<std::size_t>(y) * w + x] = row_out[x];
    }
    return out;
}

Field distance_transform(const BitField& mask) {
    const auto sq = distance_transform_squared(mask);
    Field out(mask.width, mask.height);
    for (std::size_t i = 0; i < sq.size(); ++i)
        out.values[i] = std::sqrt(static_cast<double>(sq[i]));
    return out;
}

LabeledComponents connected_components(const BitField& mask, Connectivity connectivity) {
    const int w = mask.width, h = mask.height;
    LabeledComponents result;
    result.width = w;
    result.height = h;
    result.label_map.assign(static_cast<std::size_t>(w) * h, 0);
    if (w == 0 || h == 0) {
        result.component_areas.assign(1, 0);
        return result;
    }

    // first pass: provisional ids, merging with already-visited neighbors
    UnionFind uf;
    uf.make();  // id 0 reserved for background
    std::vector<std::int32_t> provisional(static_cast<std::size_t>(w) * h, 0);
    const bool diag = connectivity == Connectivity::eight;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask.at(x, y)) continue;
            const std::size_t idx = static_cast<std::size_t>(y) * w + x;
            std::int32_t id = 0;
            auto consider = [&](int nx, int ny) {
                if (nx < 0 || ny < 0 || nx >= w || ny >= h) return;
                const std::int32_t nid = provisional[static_cast<std::size_t>(ny) * w + nx];
                if (nid == 0) return;
                if (id == 0) id = nid;
                else uf.join(id, nid);
            };
            consider(x - 1, y);
            consider(x, y - 1);
            if (diag) {
                consider(x - 1, y - 1);
                consider(x + 1, y - 1);
            }
            if (id == 0) id = uf.make();
            provisional[idx] = id;
        }
    }

    // second pass: compact to contiguous labels 1..K and accumulate areas
    std::vector<std::int32_t> compact(uf.parent.size(), -1);
    compact[0] = 0;
    std::int32_t next = 1;
    std::int64_t background = 0;
    std::vector<std::int64_t> areas(1, 0);
    for (std::size_t i = 0; i < provisional.size(); ++i) {
        if (provisional[i] == 0) {
            ++background;
            continue;
        }
        const std::int32_t root = uf.find(provisional[i]);
        if (compact[root] < 0) {
            compact[root] = next++;
            areas.push_back(0);
        }
        const std::int32_t label = compact[root];
        result.label_map[i] = label;
        ++areas[static_cast<std::size_t>(label)];
    }
    areas[0] = background;
    result.component_areas = std::move(areas);
    result.component_count = next - 1;
    return result;
}

VoidStats enclosed_voids(const BitField& occupancy) {
    const int w = occupancy.width, h = occupancy.height;
    BitField complement(w, h);
    for (std::size_t i = 0; i < occupancy.bits.size(); ++i)
        complement.bits[i] = occupancy.bits[i] ? 0 : 1;

    const LabeledComponents labels = connected_components(complement, Connectivity::four);

    // components touching the grid border connect to the padded outside
    std::vector<std::uint8_t> outside(labels.component_areas.size(), 0);
    auto mark = [&](int x, int y) {
        const std::int32_t label = labels.label_map[static_cast<std::size_t>(y) * w + x];
        if (label > 0) outside[static_cast<std::size_t>(label)] = 1;
    };
    for (int x = 0; x < w; ++x) {
        mark(x, 0);
        mark(x, h - 1);
    }
    for (int y = 0; y < h; ++y) {
        mark(0, y);
        mark(w - 1, y);
    }

    VoidStats stats;
    for (std::int32_t label = 1; label <= labels.component_count; ++label) {
        if (outside[static_cast<std::size_t>(label)]) continue;
        ++stats.count;
        stats.area += labels.component_areas[static_cast<std::size_t>(label)];
    }
    return stats;
}

}  // namespace timflow
