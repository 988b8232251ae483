#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "timflow/imageops.hpp"
#include "timflow/raster.hpp"

using namespace timflow;

TEST_CASE("axis-aligned segment deposits its in-cell length per cell") {
    DispensePath path;
    path.points = {{0.0, 2.5}, {10.0, 2.5}};
    path.feedrate = 1.0;
    const MaterialGrid grid = rasterize_coarse(path, 12, 6, 1.0);
    for (int x = 0; x < 10; ++x) CHECK(grid.at(x, 2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(grid.at(10, 2) == 0.0);
    CHECK(grid.at(5, 1) == 0.0);
    CHECK(grid.at(5, 3) == 0.0);
    CHECK(grid.total_volume() == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(grid.offgrid_sink == 0.0);
}

TEST_CASE("zero feedrate leaves the grid empty") {
    DispensePath path;
    path.points = {{1.0, 1.0}, {8.0, 4.0}, {3.0, 7.0}};
    path.feedrate = 0.0;
    const MaterialGrid grid = rasterize_coarse(path, 10, 10, 1.0);
    CHECK(grid.total_volume() == 0.0);
}

TEST_CASE("45-degree diagonal across a 2x2 grid") {
    DispensePath path;
    path.points = {{0.0, 0.0}, {2.0, 2.0}};
    path.feedrate = 1.0;
    const MaterialGrid grid = rasterize_coarse(path, 2, 2, 1.0);

    // exact clipping: the centerline crosses (0,0) and (1,1), sqrt(2) in each
    const double expected = std::sqrt(2.0);
    CHECK(grid.at(0, 0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(grid.at(1, 1) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(grid.at(1, 0) == 0.0);
    CHECK(grid.at(0, 1) == 0.0);
    CHECK(grid.total_volume() == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));

    // dense-sampling oracle agrees cell by cell
    const MaterialGrid ref = oracles::sampled_raster(path, 2, 2, 1.0);
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 2; ++x)
            CHECK(grid.at(x, y) == doctest::Approx(ref.at(x, y)).epsilon(1e-4));
}

TEST_CASE("off-grid geometry deposits into the sink, conserving volume") {
    DispensePath path;
    path.points = {{-5.0, 2.5}, {15.0, 2.5}};
    path.feedrate = 2.0;
    const MaterialGrid grid = rasterize_coarse(path, 10, 5, 1.0);
    CHECK(grid.offgrid_sink == doctest::Approx(2.0 * 10.0).epsilon(1e-12));
    CHECK(grid.total_volume() == doctest::Approx(2.0 * 20.0).epsilon(1e-12));
}

TEST_CASE("conservation holds for random paths") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        const int segments = 1 + static_cast<int>(rng() % 8);
        const DispensePath path =
            oracles::random_path(rng, 50, 50, segments, 100.0 + (trial % 7) * 55.0, -4.0);
        const MaterialGrid grid = rasterize_coarse(path, 50, 50, 1.0);
        const double expected = path.feedrate * polyline_length(path.points);
        CHECK(std::abs(grid.total_volume() - expected) <= 1e-9 * expected);
    }
}

TEST_CASE("integer translation shifts the deposit bit-identically") {
    std::mt19937 rng(29);
    for (int trial = 0; trial < 10; ++trial) {
        DispensePath path = oracles::random_path(rng, 30, 30, 4, 77.0, 6.0);
        // snap to 1/64 so coordinate+offset stays exact in binary floating point
        for (Vec2& p : path.points) {
            p.x = std::round(p.x * 64.0) / 64.0;
            p.y = std::round(p.y * 64.0) / 64.0;
        }
        DispensePath shifted = path;
        for (Vec2& p : shifted.points) {
            p.x += 3.0;
            p.y += 2.0;
        }
        const MaterialGrid a = rasterize_coarse(path, 40, 40, 1.0);
        const MaterialGrid b = rasterize_coarse(shifted, 40, 40, 1.0);
        bool identical = true;
        for (int y = 0; y < 30; ++y)
            for (int x = 0; x < 30; ++x)
                identical = identical && a.at(x, y) == b.at(x + 3, y + 2);
        CHECK(identical);
    }
}

TEST_CASE("fine raster of a straight segment is a width-exact band") {
    DispensePath path;
    path.points = {{5.0, 10.5}, {15.0, 10.5}};
    path.feedrate = 1.0;
    RasterSettings settings{4, 1.0};
    const BitField fine = rasterize_fine(path, 25, 25, settings);

    // band rows: pixel centers within 2 of y = 42
    for (int y = 0; y < fine.height; ++y) {
        const bool in_band = std::abs((y + 0.5) - 42.0) <= 2.0;
        CHECK(static_cast<bool>(fine.at(40, y)) == in_band);
    }

    // every set pixel is within bead radius of the scaled centerline (the
    // centerline-crossed pixels get half-diagonal slack)
    const double r = 2.0;
    for (int y = 0; y < fine.height; ++y) {
        for (int x = 0; x < fine.width; ++x) {
            if (!fine.at(x, y)) continue;
            const double cx = std::clamp(x + 0.5, 20.0, 60.0);
            const double dist = std::hypot((x + 0.5) - cx, (y + 0.5) - 42.0);
            CHECK(dist <= r + 0.75);
        }
    }
}

TEST_CASE("X path: connected footprint, four background wedges, no voids") {
    // corner-to-corner so the arms split the complement into four wedges
    DispensePath path;
    path.points = {{0.0, 0.0}, {20.0, 20.0}, {10.0, 10.0}, {20.0, 0.0}, {0.0, 20.0}};
    path.feedrate = 1.0;
    const BitField fine = rasterize_fine(path, 20, 20, {8, 1.0});

    CHECK(connected_components(fine, Connectivity::eight).component_count == 1);
    BitField complement(fine.width, fine.height);
    for (std::size_t i = 0; i < fine.bits.size(); ++i)
        complement.bits[i] = fine.bits[i] ? 0 : 1;
    CHECK(connected_components(complement, Connectivity::four).component_count == 4);
    CHECK(enclosed_voids(fine).count == 0);
}

TEST_CASE("closed square loop encloses exactly one background pocket") {
    DispensePath path;
    path.points = {{5.0, 5.0}, {15.0, 5.0}, {15.0, 15.0}, {5.0, 15.0}, {5.0, 5.0}};
    path.feedrate = 1.0;
    const BitField fine = rasterize_fine(path, 20, 20, {8, 1.0});
    const VoidStats voids = enclosed_voids(fine);
    CHECK(voids.count == 1);
    CHECK(voids.area > 0);

    BitField complement(fine.width, fine.height);
    for (std::size_t i = 0; i < fine.bits.size(); ++i)
        complement.bits[i] = fine.bits[i] ? 0 : 1;
    CHECK(connected_components(complement, Connectivity::four).component_count == 2);
}

TEST_CASE("fine raster at scale 1 with unit bead equals thresholded coarse support") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 25; ++trial) {
        const DispensePath path = oracles::random_path(rng, 20, 20, 3, 10.0, 3.0);
        const MaterialGrid coarse = rasterize_coarse(path, 20, 20, 1.0);
        const BitField fine = rasterize_fine(path, 20, 20, {1, 1.0});
        bool equal = true;
        for (int y = 0; y < 20; ++y)
            for (int x = 0; x < 20; ++x)
                equal = equal && ((coarse.at(x, y) > 0.0) == (fine.at(x, y) != 0));
        CHECK(equal);
    }
}
