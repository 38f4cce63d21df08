// SPDX-License-Identifier: Apache-2.0
//
// skysim - system-level simulator of cellular service to low-altitude aerial users
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "skysim/channel.hpp"
#include "skysim/common.hpp"
#include "skysim/deployment.hpp"
#include "skysim/link.hpp"

namespace skysim {

struct DownlinkParams {
    double tx_power_dbm = 46.0;  // per cell over the whole carrier
    double bandwidth_mhz = 10.0;
    double ue_noise_figure_db = 9.0;
    double resource_utilization = 0.2;  // activity scaling of every interferer
    bool bernoulli_interference = false;  // per-cell on/off draws instead of scaling
};

/// Downlink SINR for one UE: serving power over (ru-scaled sum of all other
/// cells' powers + noise), computed in the linear domain.
double compute_dl_sinr_db(int serving_cell, std::span<const LinkState> links, double ru,
                          double tx_power_dbm, double noise_dbm);

struct UeDownlinkSample {
    int ue = 0;
    int serving_cell = 0;
    UeKind kind = UeKind::terrestrial;
    double coupling_gain_db = 0.0;
    double sinr_db = 0.0;
};

/// One altitude's census aggregated over seeds.
struct DownlinkSnapshot {
    double altitude_m = 0.0;
    double resource_utilization = 0.0;
    std::vector<UeDownlinkSample> samples;
    std::vector<double> coupling_cdf;  // sorted
    std::vector<double> sinr_cdf;      // sorted

    double median_sinr_db() const { return percentile_sorted(sinr_cdf, 0.5); }
    double p05_coupling_db() const { return percentile_sorted(coupling_cdf, 0.05); }
};

struct CoverageReport {
    double altitude_m = 0.0;
    double fraction_sinr_above_m6 = 0.0;   // release-12 floor, -6 dB
    double fraction_sinr_above_m10 = 0.0;  // coverage-enhanced floor, -10 dB
    double fraction_rate_above_c2 = 0.0;   // mapped rate >= 100 kbps
};

inline constexpr double kSinrFloorRelease12Db = -6.0;
inline constexpr double kSinrFloorEnhancedDb = -10.0;
inline constexpr double kC2RateFloorBps = 100e3;

CoverageReport coverage_check(const DownlinkSnapshot& snapshot,
                              double bandwidth_hz);

/// Full-network downlink census: per altitude, UEs dropped over all cells for
/// each seed, coupling gain and SINR collected into CDFs.
std::vector<DownlinkSnapshot> run_dl_analysis(const NetworkLayout& layout,
                                              const AntennaPattern& pattern,
                                              const ChannelParams& channel,
                                              const DownlinkParams& dl,
                                              const std::vector<double>& altitudes_m, int per_cell,
                                              const std::vector<std::uint64_t>& seeds,
                                              int workers = 1);

}  // namespace skysim
