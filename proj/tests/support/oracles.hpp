#pragma once

// Independent reference implementations for oracle-style tests. Everything in
// here is deliberately naive (brute force scans, recursive fills, dense
// sampling) and shares no code with the library paths it checks.

#include <cstdint>
#include <random>
#include <vector>

#include "timflow/grid.hpp"
#include "timflow/imageops.hpp"
#include "timflow/path.hpp"

namespace oracles {

/// O(N^2 M) nearest-set-cell scan; exact squared distances.
std::vector<std::int64_t> brute_force_distance_sq(const timflow::BitField& mask);

/// Stack-based flood fill labeling (labels 1..K in scan order, 0 background).
timflow::LabeledComponents flood_fill_components(const timflow::BitField& mask,
                                                 timflow::Connectivity connectivity);

/// Void detection via flood fill from the border of the complement.
timflow::VoidStats flood_fill_voids(const timflow::BitField& occupancy);

/// True iff the two label maps define the same partition (labels may differ).
bool same_partition(const std::vector<std::int32_t>& a, const std::vector<std::int32_t>& b);

/// Dense midpoint sampling of each segment: volume feedrate * (len / samples)
/// dropped at each sample midpoint's cell. Converges to the exact clipping
/// deposit as samples grows.
timflow::MaterialGrid sampled_raster(const timflow::DispensePath& path, int width, int height,
                                     double cell_size, int samples_per_segment = 200000);

timflow::BitField random_mask(std::mt19937& rng, int width, int height, double fill_probability);

/// Random path with n_segments segments inside [margin, width-margin] x
/// [margin, height-margin], feedrate sized to `volume`.
timflow::DispensePath random_path(std::mt19937& rng, int width, int height, int n_segments,
                                  double volume, double margin = 2.0);

}  // namespace oracles
