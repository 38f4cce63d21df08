// SPDX-License-Identifier: Apache-2.0
//
// skysim - system-level simulator of cellular service to low-altitude aerial users
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "skysim/antenna.hpp"
#include "skysim/common.hpp"
#include "skysim/deployment.hpp"
#include "skysim/link.hpp"
#include "skysim/rng.hpp"

namespace skysim {

enum class LosModel {
    rma_baseline,       // rural-macro statistical curve, valid up to 23 m UE height
    rma_aerial,         // altitude-interpolated extension, P_LOS -> 1 above the cutoff
    terrain_empirical,  // curve table estimated from a heightmap census
};

// Rural-macro model constants (environment description used by the
// statistical pathloss formulas). Recorded in the model ledger.
inline constexpr double kRmaAvgBuildingHeightM = 5.0;
inline constexpr double kRmaStreetWidthM = 20.0;
inline constexpr double kShadowSigmaLosDb = 4.0;
inline constexpr double kShadowSigmaNlosDb = 8.0;
inline constexpr double kRmaBaselineMaxUeHeightM = 23.0;
inline constexpr double kGroundModelAnchorHeightM = 10.0;  // interpolation anchor
inline constexpr double kPathlossMinD2dM = 10.0;
inline constexpr double kPathlossMaxD2dM = 30000.0;
inline constexpr double kMinCarrierGhz = 0.5;
inline constexpr double kMaxCarrierGhz = 6.0;

/// Empirical LOS probability curves per UE height, binned by 2D distance.
/// Missing bins (no samples) are carried as NaN and skipped by lookups.
struct LosCurveTable {
    std::vector<double> heights_m;       // ascending
    std::vector<double> bin_centers_m;   // ascending
    std::vector<std::vector<double>> p;  // [height][bin], NaN = missing

    double lookup(double d2d_m, double h_ut_m) const;
};

struct ChannelParams {
    double carrier_ghz = 0.7;
    LosModel los_model = LosModel::rma_aerial;
    double los_cutoff_m = 100.0;  // altitude above which P_LOS = 1 and shadowing = 0
    bool shadowing_enabled = true;
    const LosCurveTable* terrain_curve = nullptr;
};

/// Free-space pathloss at 3D distance d and carrier f.
inline double fspl_db(double d3d_m, double f_ghz) {
    return 32.45 + 20.0 * std::log10(f_ghz) + 20.0 * std::log10(d3d_m);
}

/// Raw rural-macro LOS pathloss (dual-slope with breakpoint). No domain
/// clamping; used directly for reference curve generation.
double rma_los_pathloss_db(double d2d_m, double h_bs_m, double h_ut_m, double f_ghz);

/// Raw rural-macro NLOS pathloss, lower-bounded by the LOS formula.
double rma_nlos_pathloss_db(double d2d_m, double h_bs_m, double h_ut_m, double f_ghz);

/// LOS probability of a link. rma_baseline raises ModelDomainError above 23 m
/// rather than extrapolating; rma_aerial interpolates log-linearly in height
/// between the ground curve at 10 m and certainty at the cutoff altitude.
double los_probability(double d2d_m, double h_ut_m, const ChannelParams& params);

/// Simulation pathloss model. Above BS antenna height propagation is free
/// space; at or below 10 m it is the rural-macro statistical model; in
/// between, the two are blended log-linearly in height so the model is
/// continuous at the switch altitude.
double pathloss_db(double d2d_m, double h_bs_m, double h_ut_m, double f_ghz, bool los);

/// Shadow-fading standard deviation: 4 dB LOS / 8 dB NLOS at or below the BS
/// antenna height, tapering linearly to 0 at the cutoff altitude.
double shadowing_sigma_db(bool los, double h_ut_m, double h_bs_m, double los_cutoff_m);

/// Zero-mean log-normal shadowing draw (dB) with the sigma above.
double shadowing_draw_db(bool los, double h_ut_m, double h_bs_m, double los_cutoff_m,
                         SplitMix64& rng);

/// Full link evaluation: wrapped geometry, antenna gain at the wrapped
/// bearing/zenith, LOS drawn from its keyed stream and frozen for the drop,
/// pathloss and shadowing composed into the coupling gain.
LinkState coupling_gain(const NetworkLayout& layout, const AntennaPattern& pattern,
                        const UserTerminal& ue, const Cell& cell, const ChannelParams& params,
                        std::uint64_t seed, std::uint64_t drop);

struct PathlossCurveRow {
    double ue_height_m;
    double d2d_m;
    double pl_los_db;
    double pl_nlos_db;
    double pl_fspl_db;
};

/// Reference pathloss curves (raw statistical models vs free space) for a
/// fixed BS height and carrier, one row per (UE height, distance).
std::vector<PathlossCurveRow> generate_pathloss_curves(double h_bs_m,
                                                       const std::vector<double>& ue_heights_m,
                                                       double f_ghz,
                                                       const std::vector<double>& d2d_m);

/// Structured plain-text dump of every channel constant, for audit.
void write_model_ledger(std::ostream& os);

}  // namespace skysim
