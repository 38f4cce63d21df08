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

namespace skysim {

/// Open-loop fractional power control: P = min(p_max, p0 + 10*log10(n_rb) + alpha*PL).
struct PowerControlConfig {
    double p0_dbm = -90.0;  // target received power per resource block
    double alpha = 1.0;     // pathloss compensation fraction
    double p_max_dbm = 23.0;

    void validate() const {
        if (alpha < 0.0 || alpha > 1.0) throw ConfigError("alpha must be in [0,1]");
        if (p_max_dbm < p0_dbm) throw ConfigError("p_max must be >= p0");
    }
};

double ul_tx_power_dbm(const PowerControlConfig& pc, int n_rb, double pathloss_db);

/// Poisson file arrivals per cell.
struct TrafficModel {
    double arrival_rate_files_per_s = 0.0;
    double file_size_bytes = 500000.0;

    double offered_load_bps() const { return arrival_rate_files_per_s * file_size_bytes * 8.0; }
    void validate() const {
        if (arrival_rate_files_per_s < 0.0) throw ConfigError("arrival rate must be >= 0");
        if (file_size_bytes <= 0.0) throw ConfigError("file size must be positive");
    }
};

enum class UlScheduler { round_robin, proportional_fair };

struct UplinkParams {
    int n_rb = 50;  // resource blocks per cell (10 MHz)
    double rb_bandwidth_hz = 180e3;
    double tti_s = 1e-3;
    double sim_s = 10.0;
    double warmup_s = 1.0;
    double bs_noise_figure_db = 5.0;
    UlScheduler scheduler = UlScheduler::round_robin;
    PowerControlConfig pc_terrestrial;
    PowerControlConfig pc_aerial;
    // -1: shared pool. Otherwise aerial UEs are schedulable only on RBs
    // [0, aerial_pool_rbs) and terrestrial only on the complement.
    int aerial_pool_rbs = -1;
    bool validate_grants = false;  // per-TTI RB/work conservation tallies
};

/// One co-scheduled interferer on the same resource block, seen at the victim BS.
struct UlInterferer {
    int cell = 0;
    int ue = 0;
    double tx_power_per_rb_dbm = 0.0;
    double coupling_to_victim_db = 0.0;
};

/// Per-RB uplink SINR at the serving BS: own received power over noise plus
/// the received powers of at most one co-scheduled UE per interfering cell.
double ul_sinr_db(double tx_power_per_rb_dbm, double coupling_to_serving_db,
                  std::span<const UlInterferer> co_scheduled, double noise_per_rb_dbm);

struct UlGroupMetrics {
    std::int64_t files_completed = 0;
    double mean_tput_bps = 0.0;
    double p05_tput_bps = 0.0;
    std::vector<double> tputs;  // per completed file, sorted
};

struct UlRunResult {
    double offered_load_bps = 0.0;  // per cell
    double altitude_m = 0.0;
    double mean_ru = 0.0;  // network mean fraction of RB*TTI grants used
    UlGroupMetrics all, aerial, terrestrial;
    bool saturated = false;
    double mean_iot_db = 0.0;  // interference over thermal at the BSs
    double aerial_pool_ru = 0.0;
    double terrestrial_pool_ru = 0.0;
    std::vector<double> per_cell_ru;
    std::int64_t grant_checks = 0;
    std::int64_t grant_violations = 0;
};

/// TTI-resolution uplink simulation of the whole network at one traffic
/// point: Poisson file arrivals per cell, round-robin (or proportional-fair)
/// scheduling, open-loop power control, per-RB interference coupling with one
/// aggressor per cell per RB.
UlRunResult run_ul_sim(const NetworkLayout& layout, const AntennaPattern& pattern,
                       const ChannelParams& channel, const UplinkParams& ul,
                       const TrafficModel& traffic, double aerial_altitude_m, double aerial_ratio,
                       int per_cell, std::uint64_t seed);

}  // namespace skysim
