// SPDX-License-Identifier: Apache-2.0
//
// skysim - system-level simulator of cellular service to low-altitude aerial users
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "skysim/channel.hpp"

#include <cmath>
#include <ostream>

namespace skysim {

namespace {

double dual_slope_pl1(double d3d_m, double f_ghz) {
    const double h = kRmaAvgBuildingHeightM;
    return 20.0 * std::log10(40.0 * std::numbers::pi * d3d_m * f_ghz / 3.0) +
           std::min(0.03 * std::pow(h, 1.72), 10.0) * std::log10(d3d_m) -
           std::min(0.044 * std::pow(h, 1.72), 14.77) + 0.002 * std::log10(h) * d3d_m;
}

double breakpoint_distance_m(double h_bs_m, double h_ut_m, double f_ghz) {
    return 2.0 * std::numbers::pi * h_bs_m * h_ut_m * (f_ghz * 1e9) / kSpeedOfLight;
}

double d3d_of(double d2d_m, double h_bs_m, double h_ut_m) {
    return std::hypot(d2d_m, h_bs_m - h_ut_m);
}

double ground_los_probability(double d2d_m) {
    if (d2d_m <= 10.0) return 1.0;
    return std::exp(-(d2d_m - 10.0) / 1000.0);
}

void check_model_domain(double d2d_m, double f_ghz) {
    if (f_ghz < kMinCarrierGhz || f_ghz > kMaxCarrierGhz)
        throw ModelDomainError("carrier frequency " + std::to_string(f_ghz) +
                               " GHz outside [0.5, 6] GHz");
    if (d2d_m < kPathlossMinD2dM || d2d_m > kPathlossMaxD2dM)
        throw ModelDomainError("2D distance " + std::to_string(d2d_m) +
                               " m outside [10 m, 30 km]");
}

}  // namespace

double rma_los_pathloss_db(double d2d_m, double h_bs_m, double h_ut_m, double f_ghz) {
    const double d3d = d3d_of(d2d_m, h_bs_m, h_ut_m);
    const double dbp = breakpoint_distance_m(h_bs_m, h_ut_m, f_ghz);
    if (d2d_m <= dbp || dbp <= 0.0) return dual_slope_pl1(d3d, f_ghz);
    const double d3d_bp = d3d_of(dbp, h_bs_m, h_ut_m);
    return dual_slope_pl1(d3d_bp, f_ghz) + 40.0 * std::log10(d3d / d3d_bp);
}

double rma_nlos_pathloss_db(double d2d_m, double h_bs_m, double h_ut_m, double f_ghz) {
    const double d3d = d3d_of(d2d_m, h_bs_m, h_ut_m);
    const double h = kRmaAvgBuildingHeightM;
    const double w = kRmaStreetWidthM;
    const double nlos =
        161.04 - 7.1 * std::log10(w) + 7.5 * std::log10(h) -
        (24.37 - 3.7 * std::pow(h / h_bs_m, 2.0)) * std::log10(h_bs_m) +
        (43.42 - 3.1 * std::log10(h_bs_m)) * (std::log10(d3d) - 3.0) +
        20.0 * std::log10(f_ghz) -
        (3.2 * std::pow(std::log10(11.75 * h_ut_m), 2.0) - 4.97);
    return std::max(nlos, rma_los_pathloss_db(d2d_m, h_bs_m, h_ut_m, f_ghz));
}

double LosCurveTable::lookup(double d2d_m, double h_ut_m) const {
    if (heights_m.empty() || bin_centers_m.empty())
        throw ModelDomainError("empty LOS curve table");

    auto row_lookup = [&](std::size_t hi) {
        const std::vector<double>& row = p[hi];
        // Skip missing bins; clamp outside the populated span.
        double prev_x = 0.0, prev_p = std::nan("");
        double result = std::nan("");
        for (std::size_t b = 0; b < bin_centers_m.size(); ++b) {
            if (std::isnan(row[b])) continue;
            const double x = bin_centers_m[b];
            if (std::isnan(prev_p)) {
                if (d2d_m <= x) return row[b];
            } else if (d2d_m <= x) {
                const double t = (std::log(d2d_m) - std::log(prev_x)) /
                                 (std::log(x) - std::log(prev_x));
                return prev_p + t * (row[b] - prev_p);
            }
            prev_x = x;
            prev_p = row[b];
            result = row[b];
        }
        if (std::isnan(result)) throw ModelDomainError("LOS curve row has no populated bins");
        return result;  // beyond the last populated bin
    };

    if (h_ut_m <= heights_m.front()) return row_lookup(0);
    if (h_ut_m >= heights_m.back()) return row_lookup(heights_m.size() - 1);
    std::size_t hi = 1;
    while (heights_m[hi] < h_ut_m) ++hi;
    const double t = (h_ut_m - heights_m[hi - 1]) / (heights_m[hi] - heights_m[hi - 1]);
    return (1.0 - t) * row_lookup(hi - 1) + t * row_lookup(hi);
}

double los_probability(double d2d_m, double h_ut_m, const ChannelParams& params) {
    if (d2d_m < 0.0) throw ModelDomainError("negative 2D distance");
    if (h_ut_m < 1.5) throw ModelDomainError("UE height below 1.5 m");
    switch (params.los_model) {
        case LosModel::rma_baseline:
            if (h_ut_m > kRmaBaselineMaxUeHeightM)
                throw ModelDomainError(
                    "rma_baseline LOS model queried at " + std::to_string(h_ut_m) +
                    " m; only applicable up to 23 m (use rma_aerial or terrain_empirical)");
            return ground_los_probability(d2d_m);
        case LosModel::rma_aerial: {
            if (h_ut_m >= params.los_cutoff_m) return 1.0;
            const double pg = ground_los_probability(d2d_m);
            if (h_ut_m <= kGroundModelAnchorHeightM) return pg;
            const double w = std::log(h_ut_m / kGroundModelAnchorHeightM) /
                             std::log(params.los_cutoff_m / kGroundModelAnchorHeightM);
            return (1.0 - w) * pg + w;
        }
        case LosModel::terrain_empirical:
            if (params.terrain_curve == nullptr)
                throw ConfigError("terrain_empirical LOS model requires a curve table");
            if (d2d_m <= 10.0) return 1.0;
            return params.terrain_curve->lookup(d2d_m, h_ut_m);
    }
    throw std::logic_error("unreachable");
}

double pathloss_db(double d2d_m, double h_bs_m, double h_ut_m, double f_ghz, bool los) {
    check_model_domain(d2d_m, f_ghz);
    const double d3d = d3d_of(d2d_m, h_bs_m, h_ut_m);
    if (h_ut_m > h_bs_m) return fspl_db(d3d, f_ghz);

    auto ground = [&](double h_ut) {
        return los ? rma_los_pathloss_db(d2d_m, h_bs_m, h_ut, f_ghz)
                   : rma_nlos_pathloss_db(d2d_m, h_bs_m, h_ut, f_ghz);
    };
    if (h_ut_m <= kGroundModelAnchorHeightM) return ground(h_ut_m);

    const double w = std::log(h_ut_m / kGroundModelAnchorHeightM) /
                     std::log(h_bs_m / kGroundModelAnchorHeightM);
    return (1.0 - w) * ground(h_ut_m) + w * fspl_db(d3d, f_ghz);
}

double shadowing_sigma_db(bool los, double h_ut_m, double h_bs_m, double los_cutoff_m) {
    const double sigma0 = los ? kShadowSigmaLosDb : kShadowSigmaNlosDb;
    if (h_ut_m <= h_bs_m) return sigma0;
    if (h_ut_m >= los_cutoff_m) return 0.0;
    return sigma0 * (1.0 - (h_ut_m - h_bs_m) / (los_cutoff_m - h_bs_m));
}

double shadowing_draw_db(bool los, double h_ut_m, double h_bs_m, double los_cutoff_m,
                         SplitMix64& rng) {
    const double sigma = shadowing_sigma_db(los, h_ut_m, h_bs_m, los_cutoff_m);
    if (sigma == 0.0) return 0.0;
    return sigma * rng.normal();
}

LinkState coupling_gain(const NetworkLayout& layout, const AntennaPattern& pattern,
                        const UserTerminal& ue, const Cell& cell, const ChannelParams& params,
                        std::uint64_t seed, std::uint64_t drop) {
    const Site& site = layout.site_of(cell);
    const Vec2 disp = wrap_displacement(site.position, ue.position, layout);

    LinkState link;
    link.cell = cell.id;
    link.ue = ue.id;
    link.d2d_m = disp.norm();
    link.d3d_m = std::hypot(link.d2d_m, ue.height_agl_m - site.antenna_height_m);

    const double theta =
        kRadToDeg * std::acos((ue.height_agl_m - site.antenna_height_m) / link.d3d_m);
    const double phi = wrap180(kRadToDeg * std::atan2(disp.y, disp.x) - cell.azimuth_deg);
    link.antenna_gain_dbi = pattern.gain_dbi(theta, phi);

    // Model floor: links inside the statistical model's minimum range are
    // evaluated at the 10 m floor (UE drops keep 2D distances above 35 m).
    const double d2d_model = std::max(link.d2d_m, kPathlossMinD2dM);

    const double p_los = los_probability(d2d_model, ue.height_agl_m, params);
    auto los_rng = keyed_stream({seed, rngtag::kLos, drop, static_cast<std::uint64_t>(cell.id),
                                 static_cast<std::uint64_t>(ue.id)});
    link.los = los_rng.uniform() < p_los;

    link.pathloss_db =
        pathloss_db(d2d_model, site.antenna_height_m, ue.height_agl_m, params.carrier_ghz, link.los);

    if (params.shadowing_enabled) {
        auto sf_rng =
            keyed_stream({seed, rngtag::kShadowing, drop, static_cast<std::uint64_t>(cell.id),
                          static_cast<std::uint64_t>(ue.id)});
        link.shadowing_db = shadowing_draw_db(link.los, ue.height_agl_m, site.antenna_height_m,
                                              params.los_cutoff_m, sf_rng);
    }

    link.coupling_gain_db = link.antenna_gain_dbi - link.pathloss_db - link.shadowing_db;
    return link;
}

std::vector<PathlossCurveRow> generate_pathloss_curves(double h_bs_m,
                                                       const std::vector<double>& ue_heights_m,
                                                       double f_ghz,
                                                       const std::vector<double>& d2d_m) {
    std::vector<PathlossCurveRow> rows;
    rows.reserve(ue_heights_m.size() * d2d_m.size());
    for (double h_ut : ue_heights_m) {
        for (double d : d2d_m) {
            check_model_domain(d, f_ghz);
            PathlossCurveRow row;
            row.ue_height_m = h_ut;
            row.d2d_m = d;
            row.pl_los_db = rma_los_pathloss_db(d, h_bs_m, h_ut, f_ghz);
            row.pl_nlos_db = rma_nlos_pathloss_db(d, h_bs_m, h_ut, f_ghz);
            row.pl_fspl_db = fspl_db(d3d_of(d, h_bs_m, h_ut), f_ghz);
            rows.push_back(row);
        }
    }
    return rows;
}

void write_model_ledger(std::ostream& os) {
    os << "# skysim channel model ledger\n"
       << "# Every compiled-in channel constant, for audit. Scenario knobs live\n"
       << "# in the run configuration file.\n"
       << "\n[physics]\n"
       << "speed_of_light_mps = 299792458\n"
       << "thermal_noise_dbm_hz = -174\n"
       << "\n[free_space]\n"
       << "fspl_db = 32.45 + 20*log10(f_ghz) + 20*log10(d3d_m)\n"
       << "\n[rural_macro]\n"
       << "avg_building_height_m = " << kRmaAvgBuildingHeightM << "\n"
       << "street_width_m = " << kRmaStreetWidthM << "\n"
       << "los_breakpoint_m = 2*pi*h_bs*h_ut*f_hz/c\n"
       << "los_pl1_db = 20*log10(40*pi*d3d*f_ghz/3) + min(0.03*h^1.72,10)*log10(d3d)"
          " - min(0.044*h^1.72,14.77) + 0.002*log10(h)*d3d\n"
       << "los_pl2_db = pl1(d_bp) + 40*log10(d3d/d3d_bp)\n"
       << "nlos_db = max(los_db, 161.04 - 7.1*log10(W) + 7.5*log10(h)"
          " - (24.37-3.7*(h/h_bs)^2)*log10(h_bs)"
          " + (43.42-3.1*log10(h_bs))*(log10(d3d)-3) + 20*log10(f_ghz)"
          " - (3.2*log10(11.75*h_ut)^2 - 4.97))\n"
       << "los_probability_ground = min(1, exp(-(d2d-10)/1000))\n"
       << "valid_d2d_m = [" << kPathlossMinD2dM << ", " << kPathlossMaxD2dM << "]\n"
       << "valid_carrier_ghz = [" << kMinCarrierGhz << ", " << kMaxCarrierGhz << "]\n"
       << "baseline_max_ue_height_m = " << kRmaBaselineMaxUeHeightM << "\n"
       << "\n[altitude_handling]\n"
       << "pathloss_above_bs_height = free_space\n"
       << "pathloss_interpolation = log-linear in height between the ground model at "
       << kGroundModelAnchorHeightM << " m and free space at the BS antenna height\n"
       << "los_interpolation = log-linear in height between the ground curve at "
       << kGroundModelAnchorHeightM << " m and 1.0 at the cutoff altitude\n"
       << "\n[shadow_fading]\n"
       << "sigma_los_db = " << kShadowSigmaLosDb << "\n"
       << "sigma_nlos_db = " << kShadowSigmaNlosDb << "\n"
       << "sigma_taper = linear to 0 between the BS antenna height and the cutoff altitude\n"
       << "correlation = i.i.d. per link (optional exponential decorrelation, 50 m,"
          " on trajectories)\n"
       << "\n[deployment]\n"
       << "min_ue_site_distance_m = " << kMinUeSiteDistanceM << "\n"
       << "\n[link_rate]\n"
       << "rate_bps = min(" << kShannonAttenuation << "*bw_hz*log2(1+sinr), "
       << kMaxSpectralEfficiency << "*bw_hz)\n";
}

}  // namespace skysim
