// SPDX-License-Identifier: Apache-2.0
//
// skysim - system-level simulator of cellular service to low-altitude aerial users
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "skysim/channel.hpp"
#include "skysim/common.hpp"

namespace skysim {

enum class HeightmapFormat { ascii_grid, flat_binary };

/// Raster of composite terrain + building elevations. Values are quantized to
/// the vertical resolution on load. Row 0 is the southernmost row; the ASCII
/// format stores rows north-to-south and is flipped by the reader.
struct Heightmap {
    Vec2 origin;               // lower-left corner (x, y) in meters
    double cell_size_m = 5.0;  // horizontal resolution
    double quantization_m = 0.15;
    int ncols = 0;
    int nrows = 0;
    std::vector<float> z;  // row-major, index = row * ncols + col

    float at(int col, int row) const {
        return z[static_cast<std::size_t>(row) * static_cast<std::size_t>(ncols) +
                 static_cast<std::size_t>(col)];
    }
    bool in_bounds(Vec2 p) const;
    /// Bilinear elevation between cell centers, clamped at the border.
    double elevation_at(Vec2 p) const;
    Vec2 min_corner() const { return origin; }
    Vec2 max_corner() const {
        return {origin.x + cell_size_m * ncols, origin.y + cell_size_m * nrows};
    }
};

Heightmap load_heightmap(const std::string& path, HeightmapFormat format,
                         double quantization_m = 0.15);
void save_heightmap(const Heightmap& map, const std::string& path, HeightmapFormat format);

/// True iff the 3D segment a-b clears the terrain strictly at every sample
/// point, stepping half a raster cell at a time. Endpoints are excluded;
/// endpoints closer than one cell have no intermediate samples. The z
/// components are absolute elevations (AGL height + terrain at the foot).
bool trace_los(Vec2 a_xy, double a_z, Vec2 b_xy, double b_z, const Heightmap& map);

struct LosCurveParams {
    int n_bs_drops = 100;
    double bs_height_agl_m = 35.0;
    std::vector<double> ue_heights_m{1.5, 50.0};
    std::vector<double> bin_edges_m;  // empty = default 46 log bins over [10 m, 35 km]
    int ue_samples_per_drop = 2000;   // per (BS drop, UE height)
    double building_reject_threshold_m = 2.0;
    std::uint64_t seed = 1;
};

struct LosCurveEstimate {
    LosCurveTable table;                       // NaN rows where a bin had no samples
    std::vector<std::vector<std::int64_t>> n;  // samples per [height][bin]
};

std::vector<double> default_los_bin_edges();

/// Monte-Carlo LOS census over a heightmap: BS positions dropped at random
/// (rejected inside buildings, antenna bs_height_agl above local terrain),
/// UE positions sampled around each BS log-uniformly in distance so every
/// bin is populated. Bins with zero samples are reported missing, not zero.
/// Bit-for-bit reproducible for a fixed seed.
LosCurveEstimate estimate_los_curve(const Heightmap& map, const LosCurveParams& params);

/// Curve-table file exchange (ue_height_m,d2d_bin_m,p_los,n_samples); a
/// missing bin carries an empty p_los field.
LosCurveTable load_los_curve_csv(const std::string& path);

}  // namespace skysim
