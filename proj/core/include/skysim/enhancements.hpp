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
#include "skysim/downlink.hpp"
#include "skysim/uplink.hpp"

namespace skysim {

/// Flags a terminal as airborne when its received-power profile is "flat":
/// at least k_cells cells within delta_db of the strongest one.
struct AerialClassifierConfig {
    double delta_db = 6.0;
    int k_cells = 4;

    void validate() const {
        if (delta_db <= 0.0) throw ConfigError("delta_db must be positive");
        if (k_cells < 2) throw ConfigError("k_cells must be >= 2");
    }
};

/// True iff the number of cells within delta_db of the profile maximum is at
/// least k_cells. Only relative powers matter.
bool classify_aerial(std::span<const double> profile_dbm, const AerialClassifierConfig& cfg);

struct RocPoint {
    double delta_db = 0.0;
    int k_cells = 0;
    double true_positive_rate = 0.0;
    double false_positive_rate = 0.0;
};

/// Classifier operating characteristic over a labeled census of profiles.
std::vector<RocPoint> classifier_roc(const std::vector<std::vector<double>>& profiles,
                                     const std::vector<bool>& is_aerial,
                                     const std::vector<double>& delta_grid,
                                     const std::vector<int>& k_grid);

struct FragmentationResult {
    double altitude_m = 0.0;
    double raster_step_m = 0.0;
    std::int64_t n_pixels = 0;
    std::vector<int> components_per_cell;  // indexed by cell id
    int cells_with_area = 0;
    double mean_components = 0.0;  // over cells with nonempty service area
};

/// Rasterizes the cluster's wraparound fundamental domain, assigns each pixel
/// its serving cell (deterministic channel: no shadowing, probability-weighted
/// LOS pathloss), and counts 4-connected components per cell on the torus.
FragmentationResult association_fragmentation(const NetworkLayout& layout,
                                              const AntennaPattern& pattern,
                                              const ChannelParams& channel, double altitude_m,
                                              double raster_step_m);

struct HandoverConfig {
    double hysteresis_db = 3.0;
    double time_to_trigger_ms = 160.0;
    double ue_speed_mps = 15.0;
    double altitude_m = 120.0;
    double measurement_period_ms = 40.0;
    bool correlated_shadowing = false;  // exponential decorrelation along the path
    double shadowing_decorrelation_m = 50.0;

    void validate() const;
};

struct HandoverEvent {
    double t_ms = 0.0;
    int from_cell = 0;
    int to_cell = 0;
    double sinr_db = 0.0;  // serving SINR right after the handover
};

struct HandoverTrace {
    std::vector<HandoverEvent> events;
    std::vector<int> serving_samples;  // serving cell at each measurement
    int handover_count = 0;
    int pingpong_count = 0;  // returned to the prior cell within 1 s
};

/// Straight-line trajectory with A3-style events: a neighbor must exceed the
/// serving cell by the hysteresis continuously for the time-to-trigger.
HandoverTrace simulate_trajectory_handover(const NetworkLayout& layout,
                                           const AntennaPattern& pattern,
                                           const ChannelParams& channel,
                                           const DownlinkParams& dl, const HandoverConfig& hoc,
                                           Vec2 path_start, Vec2 path_end, std::uint64_t seed);

struct PcSweepRow {
    double p0_dbm = 0.0;
    double alpha = 0.0;
    double aerial_mean_tput_bps = 0.0;
    double terrestrial_mean_tput_bps = 0.0;
    double mean_iot_db = 0.0;
    double mean_ru = 0.0;
    bool saturated = false;
};

/// Grid sweep of the uplink power-control setting at a fixed traffic point,
/// seed-averaged. When apply_to_aerial_only is set the terrestrial group keeps
/// the baseline parameters.
std::vector<PcSweepRow> sweep_power_control(const NetworkLayout& layout,
                                            const AntennaPattern& pattern,
                                            const ChannelParams& channel, const UplinkParams& ul,
                                            const TrafficModel& traffic, double aerial_altitude_m,
                                            double aerial_ratio, int per_cell,
                                            const std::vector<double>& p0_grid,
                                            const std::vector<double>& alpha_grid,
                                            bool apply_to_aerial_only,
                                            const std::vector<std::uint64_t>& seeds, int workers);

struct PartitionRow {
    double aerial_rb_fraction = 0.0;
    int aerial_pool_rbs = 0;
    double aerial_pool_ru = 0.0;
    double terrestrial_pool_ru = 0.0;
    double pool_ru_gap = 0.0;  // terrestrial - aerial; large gap = reserved pool idles
    double aerial_mean_tput_bps = 0.0;
    double terrestrial_mean_tput_bps = 0.0;
    bool saturated = false;
};

/// Orthogonal resource split between aerial and terrestrial traffic, swept
/// over pool fractions, seed-averaged.
std::vector<PartitionRow> partition_resources(const NetworkLayout& layout,
                                              const AntennaPattern& pattern,
                                              const ChannelParams& channel, const UplinkParams& ul,
                                              const TrafficModel& traffic,
                                              double aerial_altitude_m, double aerial_ratio,
                                              int per_cell, const std::vector<double>& fractions,
                                              const std::vector<std::uint64_t>& seeds,
                                              int workers);

}  // namespace skysim
