// SPDX-License-Identifier: Apache-2.0
//
// skysim - system-level simulator of cellular service to low-altitude aerial users
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <algorithm>
#include <cmath>

#include "skysim/common.hpp"

namespace skysim {

/// Large-scale state of one (cell, UE) radio link. All quantities in dB except
/// distances. coupling_gain = antenna_gain - pathloss - shadowing, exactly.
struct LinkState {
    int cell = -1;
    int ue = -1;
    double d2d_m = 0.0;
    double d3d_m = 0.0;
    bool los = true;
    double pathloss_db = 0.0;
    double shadowing_db = 0.0;
    double antenna_gain_dbi = 0.0;
    double coupling_gain_db = 0.0;
};

// Link rate mapping shared by downlink and uplink: attenuated Shannon capacity
// with a spectral-efficiency cap.
inline constexpr double kShannonAttenuation = 0.6;
inline constexpr double kMaxSpectralEfficiency = 4.4;  // bits/s/Hz

/// Achievable rate over the given bandwidth at the given SINR.
inline double attenuated_shannon_rate_bps(double sinr_db, double bandwidth_hz) {
    const double se = kShannonAttenuation * std::log2(1.0 + db_to_linear(sinr_db));
    return std::min(se, kMaxSpectralEfficiency) * bandwidth_hz;
}

/// Thermal noise floor over a bandwidth, including the receiver noise figure.
inline double noise_floor_dbm(double bandwidth_hz, double noise_figure_db) {
    return kThermalNoiseDbmHz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

}  // namespace skysim
