#include "timflow/product.hpp"

#include <string>

#include "timflow/errors.hpp"

namespace timflow {

namespace {

void check_mask(const Field& mask, int w, int h, const std::string& name) {
    if (mask.width != w || mask.height != h)
        throw ValidationError("mask '" + name + "' is " + std::to_string(mask.width) + "x" +
                              std::to_string(mask.height) + ", expected " + std::to_string(w) +
                              "x" + std::to_string(h));
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double v = mask.at(x, y);
            if (!(v >= 0.0 && v <= 1.0))
                throw ValidationError("mask '" + name + "' value " + std::to_string(v) +
                                      " at cell (" + std::to_string(x) + ", " +
                                      std::to_string(y) + ") is outside [0, 1]");
        }
    }
}

}  // namespace

void validate_gap(const GapSpec& gap) {
    if (!(gap.g_min > 0.0 && gap.g_final > 0.0 && gap.g_max > 0.0))
        throw ValidationError("gap heights must be > 0");
    if (!(gap.g_min <= gap.g_final && gap.g_final <= gap.g_max))
        throw ValidationError("gap spec must satisfy g_min <= g_final <= g_max");
    if (gap.n_steps < 1)
        throw ValidationError("gap n_steps must be >= 1");
}

void validate_product(const Product& product) {
    if (product.grid_width <= 0 || product.grid_height <= 0)
        throw ValidationError("grid dimensions must be positive");
    if (!(product.cell_size > 0.0))
        throw ValidationError("cell_size must be > 0");
    check_mask(product.areas.cool, product.grid_width, product.grid_height, "cool");
    check_mask(product.areas.over, product.grid_width, product.grid_height, "over");
    check_mask(product.areas.tab, product.grid_width, product.grid_height, "tab");
    if (product.areas.cool.sum() <= 0.0)
        throw ValidationError("empty cooling surface (cool mask sums to zero)");
    validate_gap(product.gap);
}

double total_required_volume(const TargetAreas& areas, const GapSpec& gap, double cell_size) {
    const double cool_cells = areas.cool.sum();
    if (cool_cells <= 0.0)
        throw ValidationError("empty cooling surface (cool mask sums to zero)");
    return cool_cells * cell_size * cell_size * gap.g_final;
}

}  // namespace timflow
