#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "timflow/grid.hpp"
#include "timflow/path.hpp"
#include "timflow/product.hpp"

namespace timflow {

struct Pixmap {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;  ///< 3 bytes per pixel, row-major

    Pixmap() = default;
    Pixmap(int w, int h, std::uint8_t r = 255, std::uint8_t g = 255, std::uint8_t b = 255);

    std::uint8_t* px(int x, int y) { return &rgb[3 * (static_cast<std::size_t>(y) * width + x)]; }
    const std::uint8_t* px(int x, int y) const {
        return &rgb[3 * (static_cast<std::size_t>(y) * width + x)];
    }
    void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b);

    bool operator==(const Pixmap&) const = default;
};

/// Write a portable pixmap, binary (P6) or ASCII (P3). Deterministic bytes.
void write_ppm(const std::string& file, const Pixmap& image, bool ascii = false);

/// Read a P3 or P6 pixmap with maxval 255. Throws ParseError.
Pixmap read_ppm(const std::string& file);

/// Target-area colors: over = white, cooling saturates the green channel,
/// taboo saturates the red channel (fractional assignment = reduced
/// saturation). scale is the pixel edge per grid cell.
Pixmap render_product(const Product& product, int scale = 8);

/// Product colors plus a gray material overlay (cells with height above the
/// dust threshold, darker = more material relative to `gap`) and, when given,
/// the path polyline in yellow.
Pixmap render_state(const Product& product, const MaterialGrid& state, double gap,
                    const DispensePath* path = nullptr, int scale = 8);

/// Plain occupancy: set cells gray on white, 1 pixel per cell.
Pixmap render_occupancy(const BitField& occupancy);

/// Rows of values in [0, 1] as a shaded table (one cell per value; higher =
/// stronger blue), used for sweep summaries.
Pixmap render_heat_table(const std::vector<std::vector<double>>& rows, int cell_px = 24);

}  // namespace timflow
