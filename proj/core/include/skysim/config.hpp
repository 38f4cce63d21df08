// SPDX-License-Identifier: Apache-2.0
//
// skysim - system-level simulator of cellular service to low-altitude aerial users
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "skysim/antenna.hpp"
#include "skysim/channel.hpp"
#include "skysim/common.hpp"
#include "skysim/downlink.hpp"
#include "skysim/enhancements.hpp"
#include "skysim/terrain.hpp"
#include "skysim/uplink.hpp"

namespace skysim {

// Run configuration: sectioned key/value text, parsed strictly. Unknown keys
// and unknown sections are rejected; a section that is present must be
// complete. Every scenario constant lives either here or in the model ledger.

struct LayoutSection {
    int n_sites = 37;
    double isd_m = 1732.0;
    double bs_height_m = 35.0;
    int cells_per_site = 3;
};

struct ChannelSection {
    double carrier_ghz = 0.7;
    LosModel los_model = LosModel::rma_aerial;
    double los_cutoff_m = 100.0;
    bool shadowing = true;
    std::string los_curve_file;  // required for terrain_empirical
};

struct UeSection {
    int per_cell = 10;
    std::vector<double> altitudes_m;
    double aerial_ratio = 0.0;
    double noise_figure_db = 9.0;
};

struct TrafficSection {
    std::vector<double> offered_loads_mbps;
    double file_size_bytes = 500000.0;
};

struct PcSweepSection {
    std::vector<double> p0_grid_dbm;
    std::vector<double> alpha_grid;
    bool aerial_only = true;
    double load_mbps = 2.0;
};

struct PartitionSection {
    std::vector<double> fractions;
    double load_mbps = 2.0;
};

struct TerrainSection {
    std::string heightmap;
    HeightmapFormat format = HeightmapFormat::ascii_grid;
    double quantization_m = 0.15;
    int n_bs_drops = 100;
    double bs_height_agl_m = 35.0;
    std::vector<double> ue_heights_m;
    int ue_samples_per_drop = 2000;
    double building_reject_threshold_m = 2.0;
};

struct PathlossCurvesSection {
    double bs_height_m = 50.0;
    std::vector<double> ue_heights_m;
    double carrier_ghz = 1.8;
    double d2d_min_m = 100.0;
    double d2d_max_m = 10000.0;
    int n_points = 50;
};

struct FragmentationSection {
    std::vector<double> altitudes_m;
    double raster_step_m = 80.0;
};

struct HandoverSection {
    HandoverConfig hoc;
    Vec2 path_start;
    Vec2 path_end;
};

struct AerialIdSection {
    std::vector<double> delta_grid_db;
    std::vector<int> k_grid;
    double altitude_m = 120.0;
};

struct RunConfig {
    std::string scenario;
    std::vector<std::uint64_t> seeds;
    LayoutSection layout;
    AntennaArrayConfig antenna;
    ChannelSection channel;
    UeSection ue;
    std::optional<DownlinkParams> downlink;
    std::optional<UplinkParams> uplink;
    std::optional<TrafficSection> traffic;
    std::optional<PcSweepSection> pc_sweep;
    std::optional<PartitionSection> partition;
    std::optional<TerrainSection> terrain;
    std::optional<PathlossCurvesSection> pathloss_curves;
    std::optional<FragmentationSection> fragmentation;
    std::optional<HandoverSection> handover;
    std::optional<AerialIdSection> aerial_id;
    std::string source_text;  // verbatim config content, hashed into run metadata
};

RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");

}  // namespace skysim
