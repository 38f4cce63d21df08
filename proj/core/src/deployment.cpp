// SPDX-License-Identifier: Apache-2.0
//
// skysim - system-level simulator of cellular service to low-altitude aerial users
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "skysim/deployment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "skysim/rng.hpp"

namespace skysim {

namespace {

struct Axial {
    int i;
    int j;
};

// Ring index of a lattice point in axial coordinates.
int hex_ring(Axial a) { return (std::abs(a.i) + std::abs(a.j) + std::abs(a.i + a.j)) / 2; }

// Tessellation shift (in lattice coordinates) for each supported cluster size.
// Cluster sizes satisfy n = i^2 + i*j + j^2, which makes the shifted copies
// tile the plane exactly.
Axial cluster_shift(int n_sites) {
    switch (n_sites) {
        case 1: return {1, 0};
        case 7: return {2, 1};
        case 19: return {3, 2};
        case 37: return {4, 3};
        default:
            throw ConfigError("unsupported n_sites " + std::to_string(n_sites) +
                              " (supported: 1, 7, 19, 37)");
    }
}

// Rotate a lattice vector by 60 degrees counterclockwise.
Axial rotate60(Axial a) { return {-a.j, a.i + a.j}; }

Vec2 lattice_to_xy(Axial a, double isd) {
    return {isd * (a.i + 0.5 * a.j), isd * (std::sqrt(3.0) / 2.0 * a.j)};
}

// Point-in-hexagon test for the Voronoi cell of the site lattice (inradius
// isd/2), with the site at the origin.
bool in_site_hexagon(Vec2 p, double isd) {
    const double r = isd / 2.0 + 1e-9;
    for (int k = 0; k < 3; ++k) {
        const double ang = kDegToRad * (60.0 * k);
        if (std::abs(p.x * std::cos(ang) + p.y * std::sin(ang)) > r) return false;
    }
    return true;
}

}  // namespace

NetworkLayout build_layout(double isd_m, int n_sites, double bs_height_m) {
    if (isd_m <= 0.0) throw ConfigError("inter-site distance must be positive");
    const Axial shift = cluster_shift(n_sites);
    const int max_ring = n_sites == 1 ? 0 : (n_sites == 7 ? 1 : (n_sites == 19 ? 2 : 3));

    NetworkLayout layout;
    layout.isd_m = isd_m;
    layout.cells_per_site = 3;

    std::vector<Axial> coords;
    for (int i = -max_ring; i <= max_ring; ++i)
        for (int j = -max_ring; j <= max_ring; ++j)
            if (hex_ring({i, j}) <= max_ring) coords.push_back({i, j});

    // Canonical ordering: by ring, then by angle.
    std::sort(coords.begin(), coords.end(), [&](Axial a, Axial b) {
        const int ra = hex_ring(a), rb = hex_ring(b);
        if (ra != rb) return ra < rb;
        const Vec2 pa = lattice_to_xy(a, isd_m), pb = lattice_to_xy(b, isd_m);
        return std::atan2(pa.y, pa.x) < std::atan2(pb.y, pb.x);
    });

    for (const Axial& a : coords) layout.sites.push_back({lattice_to_xy(a, isd_m), bs_height_m});

    Axial t = shift;
    for (int k = 0; k < 6; ++k) {
        layout.wrap_translations[static_cast<std::size_t>(k)] = lattice_to_xy(t, isd_m);
        t = rotate60(t);
    }

    int cell_id = 0;
    for (int s = 0; s < n_sites; ++s)
        for (int a = 0; a < 3; ++a) layout.cells.push_back({cell_id++, s, 120.0 * a});

    return layout;
}

Vec2 wrap_displacement(Vec2 a, Vec2 b, const NetworkLayout& layout) {
    Vec2 best = b - a;
    double best_d = best.norm();
    for (const Vec2& t : layout.wrap_translations) {
        for (double sign : {1.0, -1.0}) {
            const Vec2 cand = b + t * sign - a;
            const double d = cand.norm();
            if (d < best_d) {
                best_d = d;
                best = cand;
            }
        }
    }
    return best;
}

double wrap_distance(Vec2 a, Vec2 b, const NetworkLayout& layout) {
    return wrap_displacement(a, b, layout).norm();
}

std::vector<UserTerminal> drop_ues(const NetworkLayout& layout, int per_cell,
                                   const std::vector<double>& aerial_heights_m,
                                   double aerial_ratio, std::uint64_t seed) {
    if (per_cell < 1) throw ConfigError("per_cell must be >= 1");
    if (aerial_ratio < 0.0 || aerial_ratio > 1.0) throw ConfigError("aerial_ratio must be in [0,1]");
    if (aerial_heights_m.empty()) throw ConfigError("aerial heights list must not be empty");

    const int total = per_cell * layout.n_cells();
    std::vector<UserTerminal> ues;
    ues.reserve(static_cast<std::size_t>(total));

    for (const Cell& cell : layout.cells) {
        const Site& site = layout.site_of(cell);
        const double circumradius = layout.isd_m / std::sqrt(3.0);
        for (int k = 0; k < per_cell; ++k) {
            auto rng = keyed_stream({seed, rngtag::kUeDrop, static_cast<std::uint64_t>(cell.id),
                                     static_cast<std::uint64_t>(k)});
            Vec2 p;
            while (true) {
                p = {rng.uniform(-circumradius, circumradius),
                     rng.uniform(-circumradius, circumradius)};
                if (!in_site_hexagon(p, layout.isd_m)) continue;
                if (p.norm() < kMinUeSiteDistanceM) continue;
                const double bearing = kRadToDeg * std::atan2(p.y, p.x);
                if (std::abs(wrap180(bearing - cell.azimuth_deg)) > 60.0) continue;
                break;
            }
            UserTerminal ue;
            ue.id = static_cast<int>(ues.size());
            ue.position = site.position + p;
            ue.drop_cell = cell.id;
            ues.push_back(ue);
        }
    }

    // Exact aerial count: deterministic Fisher-Yates pick.
    const int n_aerial = static_cast<int>(std::llround(aerial_ratio * total));
    std::vector<int> order(static_cast<std::size_t>(total));
    std::iota(order.begin(), order.end(), 0);
    auto pick = keyed_stream({seed, rngtag::kAerialPick});
    for (int k = 0; k < total - 1; ++k) {
        const auto j = k + static_cast<int>(pick.uniform_index(static_cast<std::uint64_t>(total - k)));
        std::swap(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(j)]);
    }
    for (int k = 0; k < n_aerial; ++k) {
        UserTerminal& ue = ues[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
        ue.kind = UeKind::aerial;
        ue.height_agl_m = aerial_heights_m[static_cast<std::size_t>(k) % aerial_heights_m.size()];
    }
    return ues;
}

int select_serving_cell(std::span<const LinkState> links) {
    if (links.empty()) throw std::invalid_argument("select_serving_cell: no links");
    int best = links[0].cell;
    double best_cg = links[0].coupling_gain_db;
    for (const LinkState& l : links.subspan(1)) {
        if (l.coupling_gain_db > best_cg ||
            (l.coupling_gain_db == best_cg && l.cell < best)) {
            best_cg = l.coupling_gain_db;
            best = l.cell;
        }
    }
    return best;
}

}  // namespace skysim
