#include "timflow/render.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "timflow/errors.hpp"
#include "timflow/objective.hpp"
#include "timflow/raster.hpp"

namespace timflow {

Pixmap::Pixmap(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b)
    : width(w), height(h), rgb(3 * static_cast<std::size_t>(w) * h) {
    for (std::size_t i = 0; i < rgb.size(); i += 3) {
        rgb[i] = r;
        rgb[i + 1] = g;
        rgb[i + 2] = b;
    }
}

void Pixmap::set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    std::uint8_t* p = px(x, y);
    p[0] = r;
    p[1] = g;
    p[2] = b;
}

void write_ppm(const std::string& file, const Pixmap& image, bool ascii) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw ValidationError("cannot open for writing: " + file);
    if (ascii) {
        out << "P3\n" << image.width << " " << image.height << "\n255\n";
        for (int y = 0; y < image.height; ++y) {
            for (int x = 0; x < image.width; ++x) {
                const std::uint8_t* p = image.px(x, y);
                out << int(p[0]) << ' ' << int(p[1]) << ' ' << int(p[2]);
                out << (x + 1 == image.width ? '\n' : ' ');
            }
        }
    } else {
        out << "P6\n" << image.width << " " << image.height << "\n255\n";
        out.write(reinterpret_cast<const char*>(image.rgb.data()),
                  static_cast<std::streamsize>(image.rgb.size()));
    }
}

namespace {

// Next whitespace-separated token, skipping '#' comments.
std::string next_token(std::istream& in) {
    std::string tok;
    for (;;) {
        const int c = in.peek();
        if (c == EOF) break;
        if (c == '#') {
            std::string line;
            std::getline(in, line);
            continue;
        }
        if (std::isspace(c)) {
            in.get();
            continue;
        }
        in >> tok;
        return tok;
    }
    throw ParseError("pixmap: unexpected end of file");
}

}  // namespace

Pixmap read_ppm(const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ParseError("cannot open: " + file);
    const std::string magic = next_token(in);
    if (magic != "P3" && magic != "P6") throw ParseError("pixmap: expected P3 or P6, got " + magic);
    Pixmap image;
    try {
        image.width = std::stoi(next_token(in));
        image.height = std::stoi(next_token(in));
        const int maxval = std::stoi(next_token(in));
        if (maxval != 255) throw ParseError("pixmap: only maxval 255 is supported");
    } catch (const std::invalid_argument&) {
        throw ParseError("pixmap: malformed header");
    }
    if (image.width <= 0 || image.height <= 0) throw ParseError("pixmap: bad dimensions");
    const std::size_t n = 3 * static_cast<std::size_t>(image.width) * image.height;
    image.rgb.resize(n);
    if (magic == "P6") {
        in.get();  // single whitespace after maxval
        in.read(reinterpret_cast<char*>(image.rgb.data()), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in.gcount()) != n) throw ParseError("pixmap: truncated data");
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            int v;
            if (!(in >> v) || v < 0 || v > 255) throw ParseError("pixmap: bad sample");
            image.rgb[i] = static_cast<std::uint8_t>(v);
        }
    }
    return image;
}

namespace {

void cell_color(const Product& product, int x, int y, std::uint8_t& r, std::uint8_t& g,
                std::uint8_t& b) {
    const double cool = product.areas.cool.at(x, y);
    const double tab = product.areas.tab.at(x, y);
    if (cool >= tab && cool > 0.0) {
        const auto off = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - cool)));
        r = off;
        g = 255;
        b = off;
    } else if (tab > 0.0) {
        const auto off = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - tab)));
        r = 255;
        g = off;
        b = off;
    } else {
        r = g = b = 255;
    }
}

void fill_cell(Pixmap& image, int cx, int cy, int scale, std::uint8_t r, std::uint8_t g,
               std::uint8_t b) {
    for (int dy = 0; dy < scale; ++dy)
        for (int dx = 0; dx < scale; ++dx) image.set(cx * scale + dx, cy * scale + dy, r, g, b);
}

}  // namespace

Pixmap render_product(const Product& product, int scale) {
    if (scale < 1) throw ValidationError("render: scale must be >= 1");
    Pixmap image(product.grid_width * scale, product.grid_height * scale);
    for (int y = 0; y < product.grid_height; ++y) {
        for (int x = 0; x < product.grid_width; ++x) {
            std::uint8_t r, g, b;
            cell_color(product, x, y, r, g, b);
            fill_cell(image, x, y, scale, r, g, b);
        }
    }
    return image;
}

Pixmap render_state(const Product& product, const MaterialGrid& state, double gap,
                    const DispensePath* path, int scale) {
    Pixmap image = render_product(product, scale);
    const double area = state.cell_area();
    for (int y = 0; y < state.height; ++y) {
        for (int x = 0; x < state.width; ++x) {
            const double fill = std::min(state.at(x, y) / (area * gap), 1.0);
            if (fill <= kCoverThreshold) continue;
            // darker gray for fuller cells: 200 down to 80
            const auto gray = static_cast<std::uint8_t>(std::lround(200.0 - 120.0 * fill));
            fill_cell(image, x, y, scale, gray, gray, gray);
        }
    }
    if (path && path->points.size() >= 2) {
        DispensePath line = *path;
        line.feedrate = std::max(line.feedrate, 1.0);
        RasterSettings settings;
        settings.fine_scale = scale;
        settings.bead_width = std::max(2.0 / scale, 0.2);  // thin polyline stroke
        const BitField stroke = rasterize_fine(line, state.width, state.height, settings);
        for (int y = 0; y < stroke.height && y < image.height; ++y)
            for (int x = 0; x < stroke.width && x < image.width; ++x)
                if (stroke.at(x, y)) image.set(x, y, 255, 225, 90);
    }
    return image;
}

Pixmap render_occupancy(const BitField& occupancy) {
    Pixmap image(occupancy.width, occupancy.height);
    for (int y = 0; y < occupancy.height; ++y)
        for (int x = 0; x < occupancy.width; ++x)
            if (occupancy.at(x, y)) image.set(x, y, 120, 120, 120);
    return image;
}

Pixmap render_heat_table(const std::vector<std::vector<double>>& rows, int cell_px) {
    if (rows.empty()) return Pixmap(1, 1);
    std::size_t cols = 0;
    for (const auto& row : rows) cols = std::max(cols, row.size());
    Pixmap image(static_cast<int>(cols) * cell_px, static_cast<int>(rows.size()) * cell_px);
    for (std::size_t ry = 0; ry < rows.size(); ++ry) {
        for (std::size_t rx = 0; rx < rows[ry].size(); ++rx) {
            const double v = std::clamp(rows[ry][rx], 0.0, 1.0);
            const auto other = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - v)));
            for (int dy = 0; dy < cell_px; ++dy)
                for (int dx = 0; dx < cell_px; ++dx)
                    image.set(static_cast<int>(rx) * cell_px + dx,
                              static_cast<int>(ry) * cell_px + dy, other, other, 255);
        }
    }
    return image;
}

}  // namespace timflow
