#pragma once

#include <cstdint>
#include <vector>

namespace timflow {

/// Dense row-major 2D scalar field. Index (x, y) with x = column, y = row.
struct Field {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    Field() = default;
    Field(int w, int h, double fill = 0.0)
        : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

    double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    std::size_t size() const { return values.size(); }

    double sum() const;
    double max() const;

    bool operator==(const Field&) const = default;
};

/// Dense row-major 2D binary mask (0/1 per cell).
struct BitField {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    BitField() = default;
    BitField(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), bits(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t& at(int x, int y) { return bits[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x]; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    std::size_t size() const { return bits.size(); }

    /// Number of set cells.
    std::size_t count() const;

    bool operator==(const BitField&) const = default;
};

/// Per-cell material volume plus the volume that has left the grid.
///
/// Cell (x, y) covers the square [x, x+1) x [y, y+1) in grid units; one grid
/// unit is cell_size length units. Cell height = amount / cell_size^2.
struct MaterialGrid {
    int width = 0;
    int height = 0;
    double cell_size = 1.0;
    std::vector<double> amounts;
    double offgrid_sink = 0.0;

    MaterialGrid() = default;
    MaterialGrid(int w, int h, double cs = 1.0)
        : width(w), height(h), cell_size(cs),
          amounts(static_cast<std::size_t>(w) * h, 0.0) {}

    double& at(int x, int y) { return amounts[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return amounts[static_cast<std::size_t>(y) * width + x]; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }

    double cell_area() const { return cell_size * cell_size; }
    /// sum(amounts) + offgrid_sink.
    double total_volume() const;
    /// Largest cell height (amount / cell_area); 0 for an empty grid.
    double max_height() const;

    bool operator==(const MaterialGrid&) const = default;
};

/// Threshold a field: result cell set iff value > threshold.
BitField binarize(const Field& f, double threshold);

}  // namespace timflow
