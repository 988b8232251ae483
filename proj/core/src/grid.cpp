#include "timflow/grid.hpp"

#include <algorithm>
#include <numeric>

namespace timflow {

double Field::sum() const {
    return std::accumulate(values.begin(), values.end(), 0.0);
}

double Field::max() const {
    if (values.empty()) return 0.0;
    return *std::max_element(values.begin(), values.end());
}

std::size_t BitField::count() const {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

double MaterialGrid::total_volume() const {
    return std::accumulate(amounts.begin(), amounts.end(), 0.0) + offgrid_sink;
}

double MaterialGrid::max_height() const {
    if (amounts.empty()) return 0.0;
    const double area = cell_area();
    return *std::max_element(amounts.begin(), amounts.end()) / area;
}

BitField binarize(const Field& f, double threshold) {
    BitField out(f.width, f.height);
    for (std::size_t i = 0; i < f.values.size(); ++i)
        out.bits[i] = f.values[i] > threshold ? 1 : 0;
    return out;
}

}  // namespace timflow
