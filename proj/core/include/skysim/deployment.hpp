// SPDX-License-Identifier: Apache-2.0
//
// skysim - system-level simulator of cellular service to low-altitude aerial users
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "skysim/common.hpp"
#include "skysim/link.hpp"

namespace skysim {

struct Site {
    Vec2 position;
    double antenna_height_m = 35.0;
};

struct Cell {
    int id = 0;
    int site = 0;
    double azimuth_deg = 0.0;  // boresight bearing, degrees CCW from +x
};

/// Hexagonal multi-cell layout with geographic wraparound. Sites sit on a
/// triangular lattice as a center site plus concentric rings; each site hosts
/// three sector cells 120 degrees apart. The wraparound translations tile the
/// plane with copies of the cluster so that cluster-edge cells see the same
/// interference environment as the center.
struct NetworkLayout {
    double isd_m = 0.0;
    int cells_per_site = 3;
    std::vector<Site> sites;
    std::vector<Cell> cells;
    std::array<Vec2, 6> wrap_translations{};

    int n_cells() const { return static_cast<int>(cells.size()); }
    const Site& site_of(const Cell& c) const { return sites[static_cast<std::size_t>(c.site)]; }
};

enum class UeKind { terrestrial, aerial };

struct UserTerminal {
    int id = 0;
    Vec2 position;
    double height_agl_m = 1.5;
    UeKind kind = UeKind::terrestrial;
    int drop_cell = 0;  // cell whose area the UE was dropped in
};

// Minimum 2D distance between a UE and any site, standard for rural macro
// evaluations; keeps every link inside the pathloss model domain.
inline constexpr double kMinUeSiteDistanceM = 35.0;

/// Build the hexagonal layout. n_sites must be 1, 7, 19 or 37 (center plus
/// zero to three full rings).
NetworkLayout build_layout(double isd_m, int n_sites, double bs_height_m);

/// Minimum distance between two points over the identity and the six
/// wraparound translations.
double wrap_distance(Vec2 a, Vec2 b, const NetworkLayout& layout);

/// Displacement a -> b under the translation that minimizes the distance.
/// Bearings and zenith angles of wrapped links are computed from this vector.
Vec2 wrap_displacement(Vec2 a, Vec2 b, const NetworkLayout& layout);

/// Drop per_cell UEs uniformly in each cell's service wedge. In mixed mode,
/// round(aerial_ratio * total) terminals are aerial and take their height from
/// the given list (cycled); the remainder are terrestrial at 1.5 m.
/// Deterministic for a fixed seed.
std::vector<UserTerminal> drop_ues(const NetworkLayout& layout, int per_cell,
                                   const std::vector<double>& aerial_heights_m,
                                   double aerial_ratio, std::uint64_t seed);

/// Cell with the maximum coupling gain; ties broken by lowest cell id.
int select_serving_cell(std::span<const LinkState> links);

}  // namespace skysim
