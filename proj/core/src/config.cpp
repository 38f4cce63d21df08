// SPDX-License-Identifier: Apache-2.0
//
// skysim - system-level simulator of cellular service to low-altitude aerial users
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "skysim/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace skysim {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// Raw key/value lines grouped by section, with consumption tracking so that
// unknown keys can be reported precisely.
class SectionView {
  public:
    SectionView(std::string name, std::map<std::string, std::string> kv)
        : name_(std::move(name)), kv_(std::move(kv)) {}

    bool has(const std::string& key) const { return kv_.count(key) > 0; }

    std::string raw(const std::string& key) {
        auto it = kv_.find(key);
        if (it == kv_.end()) {
            missing_.push_back(name_ + "." + key);
            return "";
        }
        consumed_.insert(key);
        return it->second;
    }

    double number(const std::string& key) {
        const std::string v = raw(key);
        if (v.empty()) return 0.0;
        try {
            std::size_t pos = 0;
            const double x = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (const std::exception&) {
            throw ConfigError("key '" + name_ + "." + key + "': expected a number, got '" + v + "'");
        }
    }

    int integer(const std::string& key) {
        const double x = number(key);
        if (x != std::floor(x))
            throw ConfigError("key '" + name_ + "." + key + "': expected an integer");
        return static_cast<int>(x);
    }

    bool boolean(const std::string& key) {
        const std::string v = raw(key);
        if (v == "true") return true;
        if (v == "false") return false;
        if (v.empty() && !has(key)) return false;
        throw ConfigError("key '" + name_ + "." + key + "': expected true or false, got '" + v + "'");
    }

    std::vector<double> number_list(const std::string& key) {
        const std::string v = raw(key);
        std::vector<double> out;
        if (v.empty()) return out;
        std::stringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            try {
                std::size_t pos = 0;
                out.push_back(std::stod(item, &pos));
                if (pos != item.size()) throw std::invalid_argument(item);
            } catch (const std::exception&) {
                throw ConfigError("key '" + name_ + "." + key + "': bad list element '" + item + "'");
            }
        }
        if (out.empty())
            throw ConfigError("key '" + name_ + "." + key + "': list must not be empty");
        return out;
    }

    void finish(std::vector<std::string>& all_missing) const {
        for (const auto& [k, v] : kv_)
            if (!consumed_.count(k))
                throw ConfigError("unknown key '" + k + "' in section [" + name_ + "]");
        for (const auto& m : missing_) all_missing.push_back(m);
    }

    const std::string& name() const { return name_; }

  private:
    std::string name_;
    std::map<std::string, std::string> kv_;
    std::set<std::string> consumed_;
    std::vector<std::string> missing_;
};

const std::set<std::string> kKnownSections = {
    "run",       "layout",    "antenna",         "channel",       "ue",
    "downlink",  "uplink",    "traffic",         "pc_sweep",      "partition",
    "terrain",   "pathloss_curves", "fragmentation", "handover",  "aerial_id"};

std::map<std::string, std::map<std::string, std::string>> tokenize(const std::string& text,
                                                                   const std::string& origin) {
    std::map<std::string, std::map<std::string, std::string>> sections;
    std::istringstream in(text);
    std::string line;
    std::string current;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": malformed section header");
            current = trim(line.substr(1, line.size() - 2));
            if (!kKnownSections.count(current))
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": unknown section [" +
                                  current + "]");
            sections[current];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
        if (current.empty())
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": key outside any section");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (sections[current].count(key))
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key '" + key +
                              "' in [" + current + "]");
        sections[current][key] = value;
    }
    return sections;
}

LosModel parse_los_model(const std::string& v) {
    if (v == "rma_baseline") return LosModel::rma_baseline;
    if (v == "rma_aerial") return LosModel::rma_aerial;
    if (v == "terrain_empirical") return LosModel::terrain_empirical;
    throw ConfigError("key 'channel.los_model': unknown model '" + v +
                      "' (rma_baseline, rma_aerial, terrain_empirical)");
}

void cross_validate(const RunConfig& cfg) {
    if (cfg.seeds.empty()) throw ConfigError("key 'run.seeds': seed list must not be empty");
    const int n = cfg.layout.n_sites;
    if (n != 1 && n != 7 && n != 19 && n != 37)
        throw ConfigError("key 'layout.n_sites': must be one of 1, 7, 19, 37");
    if (cfg.layout.cells_per_site != 3)
        throw ConfigError("key 'layout.cells_per_site': only 3-sector sites are supported");
    if (cfg.layout.isd_m <= 0.0) throw ConfigError("key 'layout.isd_m': must be positive");
    cfg.antenna.validate();
    if (cfg.channel.carrier_ghz < kMinCarrierGhz || cfg.channel.carrier_ghz > kMaxCarrierGhz)
        throw ConfigError("key 'channel.carrier_ghz': outside the model range [0.5, 6]");
    if (cfg.channel.los_model == LosModel::terrain_empirical && cfg.channel.los_curve_file.empty())
        throw ConfigError(
            "key 'channel.los_curve_file': required when los_model = terrain_empirical");
    if (cfg.ue.aerial_ratio < 0.0 || cfg.ue.aerial_ratio > 1.0)
        throw ConfigError("key 'ue.aerial_ratio': must be in [0,1]");
    if (cfg.ue.per_cell < 1) throw ConfigError("key 'ue.per_cell': must be >= 1");

    auto check_altitude = [&](double alt, const std::string& key) {
        if (alt < 1.5) throw ConfigError("key '" + key + "': altitude below 1.5 m");
        if (cfg.channel.los_model == LosModel::rma_baseline && alt > kRmaBaselineMaxUeHeightM)
            throw ConfigError("key '" + key + "': altitude " + std::to_string(alt) +
                              " m exceeds the 23 m validity of rma_baseline; use rma_aerial"
                              " or terrain_empirical");
    };
    for (double a : cfg.ue.altitudes_m) check_altitude(a, "ue.altitudes_m");
    if (cfg.fragmentation)
        for (double a : cfg.fragmentation->altitudes_m)
            check_altitude(a, "fragmentation.altitudes_m");
    if (cfg.handover) check_altitude(cfg.handover->hoc.altitude_m, "handover.altitude_m");
    if (cfg.aerial_id) check_altitude(cfg.aerial_id->altitude_m, "aerial_id.altitude_m");

    if (cfg.uplink) {
        cfg.uplink->pc_terrestrial.validate();
        cfg.uplink->pc_aerial.validate();
        if (cfg.uplink->n_rb < 1) throw ConfigError("key 'uplink.n_rb': must be >= 1");
        if (cfg.uplink->warmup_s < 0 || cfg.uplink->sim_s <= 0)
            throw ConfigError("key 'uplink.sim_s': simulated time must be positive");
    }
    if (cfg.traffic && cfg.traffic->file_size_bytes <= 0)
        throw ConfigError("key 'traffic.file_size_bytes': must be positive");
    if (cfg.handover) cfg.handover->hoc.validate();
    if (cfg.pc_sweep) {
        if (cfg.pc_sweep->p0_grid_dbm.empty() || cfg.pc_sweep->alpha_grid.empty())
            throw ConfigError("keys 'pc_sweep.p0_grid_dbm'/'alpha_grid': must not be empty");
        for (double a : cfg.pc_sweep->alpha_grid)
            if (a < 0.0 || a > 1.0)
                throw ConfigError("key 'pc_sweep.alpha_grid': alpha must be in [0,1]");
    }
    if (cfg.partition)
        for (double f : cfg.partition->fractions)
            if (f <= 0.0 || f >= 1.0)
                throw ConfigError("key 'partition.fractions': fractions must be in (0,1)");
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    auto raw = tokenize(text, origin);
    std::vector<std::string> missing;

    auto view = [&](const std::string& name) -> std::optional<SectionView> {
        auto it = raw.find(name);
        if (it == raw.end()) return std::nullopt;
        return SectionView(name, it->second);
    };
    auto require = [&](const std::string& name) -> SectionView {
        auto v = view(name);
        if (!v) {
            missing.push_back("[" + name + "]");
            return SectionView(name, {});
        }
        return *std::move(v);
    };

    RunConfig cfg;
    cfg.source_text = text;

    {
        SectionView s = require("run");
        cfg.scenario = s.raw("scenario");
        std::vector<double> seed_values;
        if (s.has("seeds"))
            seed_values = s.number_list("seeds");
        else
            s.raw("seeds");  // records the key as missing
        for (double v : seed_values) {
            if (v < 0 || v != std::floor(v))
                throw ConfigError("key 'run.seeds': seeds must be nonnegative integers");
            cfg.seeds.push_back(static_cast<std::uint64_t>(v));
        }
        s.finish(missing);
    }
    {
        SectionView s = require("layout");
        cfg.layout.n_sites = s.integer("n_sites");
        cfg.layout.isd_m = s.number("isd_m");
        cfg.layout.bs_height_m = s.number("bs_height_m");
        cfg.layout.cells_per_site = s.integer("cells_per_site");
        s.finish(missing);
    }
    {
        SectionView s = require("antenna");
        cfg.antenna.m_rows = s.integer("m_rows");
        cfg.antenna.n_cols = s.integer("n_cols");
        cfg.antenna.polarizations = s.integer("polarizations");
        cfg.antenna.vertical_spacing_wl = s.number("vertical_spacing_wl");
        cfg.antenna.downtilt_deg = s.number("downtilt_deg");
        cfg.antenna.element_max_gain_dbi = s.number("element_max_gain_dbi");
        cfg.antenna.element_hpbw_v_deg = s.number("element_hpbw_v_deg");
        cfg.antenna.element_hpbw_h_deg = s.number("element_hpbw_h_deg");
        cfg.antenna.element_sla_v_db = s.number("element_sla_v_db");
        cfg.antenna.element_fbr_db = s.number("element_fbr_db");
        s.finish(missing);
    }
    {
        SectionView s = require("channel");
        cfg.channel.carrier_ghz = s.number("carrier_ghz");
        cfg.channel.los_model = parse_los_model(s.raw("los_model"));
        cfg.channel.los_cutoff_m = s.number("los_cutoff_m");
        cfg.channel.shadowing = s.boolean("shadowing");
        if (s.has("los_curve_file")) cfg.channel.los_curve_file = s.raw("los_curve_file");
        s.finish(missing);
    }
    {
        SectionView s = require("ue");
        cfg.ue.per_cell = s.integer("per_cell");
        cfg.ue.altitudes_m = s.number_list("altitudes_m");
        cfg.ue.aerial_ratio = s.number("aerial_ratio");
        cfg.ue.noise_figure_db = s.number("noise_figure_db");
        s.finish(missing);
    }
    if (auto s = view("downlink")) {
        DownlinkParams dl;
        dl.tx_power_dbm = s->number("tx_power_dbm");
        dl.bandwidth_mhz = s->number("bandwidth_mhz");
        dl.resource_utilization = s->number("resource_utilization");
        dl.bernoulli_interference = s->boolean("bernoulli_interference");
        dl.ue_noise_figure_db = cfg.ue.noise_figure_db;
        s->finish(missing);
        cfg.downlink = dl;
    }
    if (auto s = view("uplink")) {
        UplinkParams ul;
        ul.n_rb = s->integer("n_rb");
        ul.rb_bandwidth_hz = s->number("rb_bandwidth_khz") * 1e3;
        ul.bs_noise_figure_db = s->number("bs_noise_figure_db");
        ul.pc_terrestrial.p0_dbm = s->number("p0_dbm");
        ul.pc_terrestrial.alpha = s->number("alpha");
        ul.pc_terrestrial.p_max_dbm = s->number("p_max_dbm");
        ul.pc_aerial = ul.pc_terrestrial;
        const std::string sched = s->raw("scheduler");
        if (sched == "round_robin")
            ul.scheduler = UlScheduler::round_robin;
        else if (sched == "proportional_fair")
            ul.scheduler = UlScheduler::proportional_fair;
        else if (!sched.empty())
            throw ConfigError("key 'uplink.scheduler': unknown scheduler '" + sched + "'");
        ul.sim_s = s->number("sim_s");
        ul.warmup_s = s->number("warmup_s");
        s->finish(missing);
        cfg.uplink = ul;
    }
    if (auto s = view("traffic")) {
        TrafficSection t;
        t.offered_loads_mbps = s->number_list("offered_loads_mbps");
        t.file_size_bytes = s->number("file_size_bytes");
        s->finish(missing);
        cfg.traffic = t;
    }
    if (auto s = view("pc_sweep")) {
        PcSweepSection p;
        p.p0_grid_dbm = s->number_list("p0_grid_dbm");
        p.alpha_grid = s->number_list("alpha_grid");
        const std::string apply = s->raw("apply_to");
        if (apply == "aerial")
            p.aerial_only = true;
        else if (apply == "all")
            p.aerial_only = false;
        else if (!apply.empty())
            throw ConfigError("key 'pc_sweep.apply_to': expected 'aerial' or 'all'");
        p.load_mbps = s->number("load_mbps");
        s->finish(missing);
        cfg.pc_sweep = p;
    }
    if (auto s = view("partition")) {
        PartitionSection p;
        p.fractions = s->number_list("fractions");
        p.load_mbps = s->number("load_mbps");
        s->finish(missing);
        cfg.partition = p;
    }
    if (auto s = view("terrain")) {
        TerrainSection t;
        t.heightmap = s->raw("heightmap");
        const std::string fmt = s->raw("format");
        if (fmt == "ascii_grid")
            t.format = HeightmapFormat::ascii_grid;
        else if (fmt == "flat_binary")
            t.format = HeightmapFormat::flat_binary;
        else if (!fmt.empty())
            throw ConfigError("key 'terrain.format': expected ascii_grid or flat_binary");
        t.quantization_m = s->number("quantization_m");
        t.n_bs_drops = s->integer("n_bs_drops");
        t.bs_height_agl_m = s->number("bs_height_agl_m");
        t.ue_heights_m = s->number_list("ue_heights_m");
        t.ue_samples_per_drop = s->integer("ue_samples_per_drop");
        t.building_reject_threshold_m = s->number("building_reject_threshold_m");
        s->finish(missing);
        cfg.terrain = t;
    }
    if (auto s = view("pathloss_curves")) {
        PathlossCurvesSection p;
        p.bs_height_m = s->number("bs_height_m");
        p.ue_heights_m = s->number_list("ue_heights_m");
        p.carrier_ghz = s->number("carrier_ghz");
        p.d2d_min_m = s->number("d2d_min_m");
        p.d2d_max_m = s->number("d2d_max_m");
        p.n_points = s->integer("n_points");
        s->finish(missing);
        cfg.pathloss_curves = p;
    }
    if (auto s = view("fragmentation")) {
        FragmentationSection f;
        f.altitudes_m = s->number_list("altitudes_m");
        f.raster_step_m = s->number("raster_step_m");
        s->finish(missing);
        cfg.fragmentation = f;
    }
    if (auto s = view("handover")) {
        HandoverSection h;
        h.hoc.hysteresis_db = s->number("hysteresis_db");
        h.hoc.time_to_trigger_ms = s->number("time_to_trigger_ms");
        h.hoc.ue_speed_mps = s->number("ue_speed_mps");
        h.hoc.altitude_m = s->number("altitude_m");
        h.hoc.measurement_period_ms = s->number("measurement_period_ms");
        h.hoc.correlated_shadowing = s->boolean("correlated_shadowing");
        h.path_start = {s->number("path_x0_m"), s->number("path_y0_m")};
        h.path_end = {s->number("path_x1_m"), s->number("path_y1_m")};
        s->finish(missing);
        cfg.handover = h;
    }
    if (auto s = view("aerial_id")) {
        AerialIdSection a;
        a.delta_grid_db = s->number_list("delta_grid_db");
        const auto ks = s->number_list("k_grid");
        for (double k : ks) a.k_grid.push_back(static_cast<int>(k));
        a.altitude_m = s->number("altitude_m");
        s->finish(missing);
        cfg.aerial_id = a;
    }

    if (!missing.empty()) {
        std::string msg = "missing required configuration keys:";
        for (const auto& m : missing) msg += " " + m;
        throw ConfigError(msg);
    }
    cross_validate(cfg);
    return cfg;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

}  // namespace skysim
