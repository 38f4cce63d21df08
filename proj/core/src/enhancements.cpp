// SPDX-License-Identifier: Apache-2.0
//
// skysim - system-level simulator of cellular service to low-altitude aerial users
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "skysim/enhancements.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "skysim/parallel.hpp"
#include "skysim/rng.hpp"

namespace skysim {

bool classify_aerial(std::span<const double> profile_dbm, const AerialClassifierConfig& cfg) {
    cfg.validate();
    if (profile_dbm.empty()) throw std::invalid_argument("empty received-power profile");
    const double peak = *std::max_element(profile_dbm.begin(), profile_dbm.end());
    int within = 0;
    for (double p : profile_dbm)
        if (p >= peak - cfg.delta_db) ++within;
    return within >= cfg.k_cells;
}

std::vector<RocPoint> classifier_roc(const std::vector<std::vector<double>>& profiles,
                                     const std::vector<bool>& is_aerial,
                                     const std::vector<double>& delta_grid,
                                     const std::vector<int>& k_grid) {
    if (profiles.size() != is_aerial.size())
        throw std::invalid_argument("profiles/labels size mismatch");
    std::vector<RocPoint> roc;
    for (double delta : delta_grid) {
        for (int k : k_grid) {
            const AerialClassifierConfig cfg{delta, k};
            std::int64_t tp = 0, fp = 0, pos = 0, neg = 0;
            for (std::size_t i = 0; i < profiles.size(); ++i) {
                const bool flagged = classify_aerial(profiles[i], cfg);
                if (is_aerial[i]) {
                    ++pos;
                    if (flagged) ++tp;
                } else {
                    ++neg;
                    if (flagged) ++fp;
                }
            }
            RocPoint p;
            p.delta_db = delta;
            p.k_cells = k;
            p.true_positive_rate = pos > 0 ? static_cast<double>(tp) / static_cast<double>(pos) : 0.0;
            p.false_positive_rate = neg > 0 ? static_cast<double>(fp) / static_cast<double>(neg) : 0.0;
            roc.push_back(p);
        }
    }
    return roc;
}

namespace {

// Deterministic link metric for raster and trajectory studies: antenna gain
// minus the LOS-probability-weighted pathloss, no shadowing.
double deterministic_coupling_db(const NetworkLayout& layout, const AntennaPattern& pattern,
                                 const ChannelParams& channel, const Cell& cell, Vec2 pos,
                                 double altitude_m) {
    const Site& site = layout.site_of(cell);
    const Vec2 disp = wrap_displacement(site.position, pos, layout);
    const double d2d = std::max(disp.norm(), kPathlossMinD2dM);
    const double d3d = std::hypot(d2d, altitude_m - site.antenna_height_m);
    const double theta = kRadToDeg * std::acos((altitude_m - site.antenna_height_m) / d3d);
    const double phi = wrap180(kRadToDeg * std::atan2(disp.y, disp.x) - cell.azimuth_deg);
    const double gain = pattern.gain_dbi(theta, phi);
    const double p_los = los_probability(d2d, altitude_m, channel);
    const double pl_los =
        pathloss_db(d2d, site.antenna_height_m, altitude_m, channel.carrier_ghz, true);
    const double pl_nlos =
        p_los < 1.0 ? pathloss_db(d2d, site.antenna_height_m, altitude_m, channel.carrier_ghz, false)
                    : pl_los;
    return gain - (p_los * pl_los + (1.0 - p_los) * pl_nlos);
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) {
        while (parent[static_cast<std::size_t>(a)] != a) {
            parent[static_cast<std::size_t>(a)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
            a = parent[static_cast<std::size_t>(a)];
        }
        return a;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[static_cast<std::size_t>(b)] = a;
    }
};

}  // namespace

FragmentationResult association_fragmentation(const NetworkLayout& layout,
                                              const AntennaPattern& pattern,
                                              const ChannelParams& channel, double altitude_m,
                                              double raster_step_m) {
    if (raster_step_m > layout.isd_m / 20.0)
        throw ConfigError("raster step must be at most ISD/20");

    // Fundamental domain of the wraparound lattice: points at least as close
    // to the origin as to any translated copy.
    const auto& ts = layout.wrap_translations;
    auto in_domain = [&](Vec2 p) {
        for (const Vec2& t : ts)
            if (2.0 * p.dot(t) > t.dot(t) + 1e-9) return false;
        for (const Vec2& t : ts) {
            const Vec2 neg{-t.x, -t.y};
            if (2.0 * p.dot(neg) > neg.dot(neg) + 1e-9) return false;
        }
        return true;
    };

    double radius = 0.0;
    for (const Vec2& t : ts) radius = std::max(radius, t.norm());
    const double extent = 0.6 * radius + 2.0 * raster_step_m;
    const int half = static_cast<int>(std::ceil(extent / raster_step_m));
    const int n_side = 2 * half + 1;

    auto pixel_center = [&](int ix, int iy) {
        return Vec2{(ix - half) * raster_step_m, (iy - half) * raster_step_m};
    };

    std::vector<std::int32_t> index(static_cast<std::size_t>(n_side) * n_side, -1);
    std::vector<std::pair<int, int>> pixels;
    for (int iy = 0; iy < n_side; ++iy)
        for (int ix = 0; ix < n_side; ++ix)
            if (in_domain(pixel_center(ix, iy))) {
                index[static_cast<std::size_t>(iy) * n_side + ix] =
                    static_cast<std::int32_t>(pixels.size());
                pixels.emplace_back(ix, iy);
            }

    const int n_pix = static_cast<int>(pixels.size());
    std::vector<std::int32_t> label(static_cast<std::size_t>(n_pix));
    for (int p = 0; p < n_pix; ++p) {
        const Vec2 pos = pixel_center(pixels[static_cast<std::size_t>(p)].first,
                                      pixels[static_cast<std::size_t>(p)].second);
        double best = -1e300;
        int best_cell = 0;
        for (const Cell& cell : layout.cells) {
            const double cg = deterministic_coupling_db(layout, pattern, channel, cell, pos,
                                                        altitude_m);
            if (cg > best) {
                best = cg;
                best_cell = cell.id;
            }
        }
        label[static_cast<std::size_t>(p)] = best_cell;
    }

    // 4-connectivity on the torus: neighbors leaving the domain are wrapped by
    // the translation that brings them closest to the origin, then snapped to
    // the nearest pixel.
    auto locate = [&](Vec2 q) -> int {
        const int ix = static_cast<int>(std::lround(q.x / raster_step_m)) + half;
        const int iy = static_cast<int>(std::lround(q.y / raster_step_m)) + half;
        if (ix < 0 || iy < 0 || ix >= n_side || iy >= n_side) return -1;
        return index[static_cast<std::size_t>(iy) * n_side + ix];
    };
    auto wrap_home = [&](Vec2 q) {
        Vec2 best = q;
        double best_d = q.norm();
        for (const Vec2& t : ts) {
            for (double sign : {1.0, -1.0}) {
                const Vec2 cand = q - t * sign;
                if (cand.norm() < best_d) {
                    best_d = cand.norm();
                    best = cand;
                }
            }
        }
        return best;
    };

    UnionFind uf(static_cast<std::size_t>(n_pix));
    const Vec2 steps[2] = {{raster_step_m, 0.0}, {0.0, raster_step_m}};
    for (int p = 0; p < n_pix; ++p) {
        const Vec2 pos = pixel_center(pixels[static_cast<std::size_t>(p)].first,
                                      pixels[static_cast<std::size_t>(p)].second);
        for (const Vec2& d : steps) {
            const Vec2 q = pos + d;
            int nb = locate(q);
            if (nb < 0) nb = locate(wrap_home(q));
            if (nb < 0 || nb == p) continue;
            if (label[static_cast<std::size_t>(nb)] == label[static_cast<std::size_t>(p)])
                uf.unite(p, nb);
        }
    }

    FragmentationResult result;
    result.altitude_m = altitude_m;
    result.raster_step_m = raster_step_m;
    result.n_pixels = n_pix;
    result.components_per_cell.assign(static_cast<std::size_t>(layout.n_cells()), 0);
    std::vector<char> seen(static_cast<std::size_t>(n_pix), 0);
    for (int p = 0; p < n_pix; ++p) {
        const int root = uf.find(p);
        if (!seen[static_cast<std::size_t>(root)]) {
            seen[static_cast<std::size_t>(root)] = 1;
            result.components_per_cell[static_cast<std::size_t>(
                label[static_cast<std::size_t>(root)])] += 1;
        }
    }
    int total = 0;
    for (int c : result.components_per_cell) {
        total += c;
        if (c > 0) result.cells_with_area += 1;
    }
    result.mean_components =
        result.cells_with_area > 0 ? static_cast<double>(total) / result.cells_with_area : 0.0;
    return result;
}

void HandoverConfig::validate() const {
    if (hysteresis_db < 0.0) throw ConfigError("hysteresis must be >= 0");
    if (measurement_period_ms <= 0.0) throw ConfigError("measurement period must be positive");
    const double ratio = time_to_trigger_ms / measurement_period_ms;
    if (std::abs(ratio - std::round(ratio)) > 1e-9)
        throw ConfigError("time_to_trigger must be a multiple of the measurement period");
    if (ue_speed_mps <= 0.0) throw ConfigError("ue_speed must be positive");
}

HandoverTrace simulate_trajectory_handover(const NetworkLayout& layout,
                                           const AntennaPattern& pattern,
                                           const ChannelParams& channel,
                                           const DownlinkParams& dl, const HandoverConfig& hoc,
                                           Vec2 path_start, Vec2 path_end, std::uint64_t seed) {
    hoc.validate();
    const int n_cells = layout.n_cells();
    const double period_s = hoc.measurement_period_ms / 1e3;
    const double step_m = hoc.ue_speed_mps * period_s;
    const double path_len = distance2d(path_start, path_end);
    const int n_samples = static_cast<int>(std::floor(path_len / step_m)) + 1;
    const int ttt_samples =
        std::max(1, static_cast<int>(std::llround(hoc.time_to_trigger_ms / hoc.measurement_period_ms)));
    const double noise_dbm = noise_floor_dbm(dl.bandwidth_mhz * 1e6, dl.ue_noise_figure_db);

    // Optional exponentially-decorrelated shadowing along the path, one AR(1)
    // process per cell.
    std::vector<double> shadow(static_cast<std::size_t>(n_cells), 0.0);
    std::vector<SplitMix64> shadow_rng;
    const double rho = std::exp(-step_m / hoc.shadowing_decorrelation_m);
    if (hoc.correlated_shadowing)
        for (int c = 0; c < n_cells; ++c)
            shadow_rng.push_back(keyed_stream(
                {seed, rngtag::kTrajectoryShadowing, static_cast<std::uint64_t>(c)}));

    HandoverTrace trace;
    std::vector<double> metric(static_cast<std::size_t>(n_cells));
    std::vector<int> ttt_counter(static_cast<std::size_t>(n_cells), 0);
    int serving = -1;
    int previous_serving = -1;
    double last_ho_ms = -1e18;

    const Vec2 dir = path_len > 0.0 ? (path_end - path_start) * (1.0 / path_len) : Vec2{1.0, 0.0};
    for (int s = 0; s < n_samples; ++s) {
        const Vec2 pos = path_start + dir * (static_cast<double>(s) * step_m);
        const double t_ms = static_cast<double>(s) * hoc.measurement_period_ms;

        for (const Cell& cell : layout.cells) {
            double m = deterministic_coupling_db(layout, pattern, channel, cell, pos,
                                                 hoc.altitude_m);
            if (hoc.correlated_shadowing) {
                const double sigma = shadowing_sigma_db(
                    true, hoc.altitude_m, layout.site_of(cell).antenna_height_m,
                    channel.los_cutoff_m);
                auto& st = shadow[static_cast<std::size_t>(cell.id)];
                const double innov = shadow_rng[static_cast<std::size_t>(cell.id)].normal();
                st = s == 0 ? innov : rho * st + std::sqrt(1.0 - rho * rho) * innov;
                m += sigma * st;
            }
            metric[static_cast<std::size_t>(cell.id)] = m;
        }

        if (serving < 0) {
            serving = static_cast<int>(std::max_element(metric.begin(), metric.end()) -
                                       metric.begin());
            trace.serving_samples.push_back(serving);
            continue;
        }

        int triggered = -1;
        for (int c = 0; c < n_cells; ++c) {
            if (c != serving && metric[static_cast<std::size_t>(c)] >
                                    metric[static_cast<std::size_t>(serving)] + hoc.hysteresis_db) {
                ttt_counter[static_cast<std::size_t>(c)] += 1;
                if (ttt_counter[static_cast<std::size_t>(c)] >= ttt_samples && triggered < 0)
                    triggered = c;
            } else {
                ttt_counter[static_cast<std::size_t>(c)] = 0;
            }
        }

        if (triggered >= 0) {
            double interference_mw = 0.0;
            for (int c = 0; c < n_cells; ++c)
                if (c != triggered)
                    interference_mw +=
                        db_to_linear(dl.tx_power_dbm + metric[static_cast<std::size_t>(c)]);
            const double sinr = linear_to_db(
                db_to_linear(dl.tx_power_dbm + metric[static_cast<std::size_t>(triggered)]) /
                (dl.resource_utilization * interference_mw + db_to_linear(noise_dbm)));

            HandoverEvent ev;
            ev.t_ms = t_ms;
            ev.from_cell = serving;
            ev.to_cell = triggered;
            ev.sinr_db = sinr;
            trace.events.push_back(ev);

            if (triggered == previous_serving && t_ms - last_ho_ms <= 1000.0)
                trace.pingpong_count += 1;
            previous_serving = serving;
            serving = triggered;
            last_ho_ms = t_ms;
            std::fill(ttt_counter.begin(), ttt_counter.end(), 0);
        }
        trace.serving_samples.push_back(serving);
    }
    trace.handover_count = static_cast<int>(trace.events.size());
    return trace;
}

std::vector<PcSweepRow> sweep_power_control(const NetworkLayout& layout,
                                            const AntennaPattern& pattern,
                                            const ChannelParams& channel, const UplinkParams& ul,
                                            const TrafficModel& traffic, double aerial_altitude_m,
                                            double aerial_ratio, int per_cell,
                                            const std::vector<double>& p0_grid,
                                            const std::vector<double>& alpha_grid,
                                            bool apply_to_aerial_only,
                                            const std::vector<std::uint64_t>& seeds, int workers) {
    if (p0_grid.empty() || alpha_grid.empty()) throw ConfigError("power-control grids must not be empty");
    if (seeds.empty()) throw ConfigError("seed list must not be empty");

    struct Point {
        double p0, alpha;
    };
    std::vector<Point> grid;
    for (double p0 : p0_grid)
        for (double a : alpha_grid) grid.push_back({p0, a});

    const std::size_t n_jobs = grid.size() * seeds.size();
    std::vector<UlRunResult> runs(n_jobs);
    parallel_over(n_jobs, workers, [&](std::size_t j) {
        const Point& pt = grid[j / seeds.size()];
        const std::uint64_t seed = seeds[j % seeds.size()];
        UplinkParams params = ul;
        params.pc_aerial.p0_dbm = pt.p0;
        params.pc_aerial.alpha = pt.alpha;
        if (!apply_to_aerial_only) {
            params.pc_terrestrial.p0_dbm = pt.p0;
            params.pc_terrestrial.alpha = pt.alpha;
        }
        runs[j] = run_ul_sim(layout, pattern, channel, params, traffic, aerial_altitude_m,
                             aerial_ratio, per_cell, seed);
    });

    std::vector<PcSweepRow> rows;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        PcSweepRow row;
        row.p0_dbm = grid[g].p0;
        row.alpha = grid[g].alpha;
        double a_t = 0, t_t = 0, iot = 0, ru = 0;
        for (std::size_t s = 0; s < seeds.size(); ++s) {
            const UlRunResult& r = runs[g * seeds.size() + s];
            a_t += r.aerial.mean_tput_bps;
            t_t += r.terrestrial.mean_tput_bps;
            iot += r.mean_iot_db;
            ru += r.mean_ru;
            row.saturated = row.saturated || r.saturated;
        }
        const double n = static_cast<double>(seeds.size());
        row.aerial_mean_tput_bps = a_t / n;
        row.terrestrial_mean_tput_bps = t_t / n;
        row.mean_iot_db = iot / n;
        row.mean_ru = ru / n;
        rows.push_back(row);
    }
    return rows;
}

std::vector<PartitionRow> partition_resources(const NetworkLayout& layout,
                                              const AntennaPattern& pattern,
                                              const ChannelParams& channel, const UplinkParams& ul,
                                              const TrafficModel& traffic,
                                              double aerial_altitude_m, double aerial_ratio,
                                              int per_cell, const std::vector<double>& fractions,
                                              const std::vector<std::uint64_t>& seeds,
                                              int workers) {
    if (fractions.empty()) throw ConfigError("fractions list must not be empty");
    if (seeds.empty()) throw ConfigError("seed list must not be empty");
    for (double f : fractions)
        if (f <= 0.0 || f >= 1.0) throw ConfigError("pool fraction must be in (0,1)");

    const std::size_t n_jobs = fractions.size() * seeds.size();
    std::vector<UlRunResult> runs(n_jobs);
    parallel_over(n_jobs, workers, [&](std::size_t j) {
        const double f = fractions[j / seeds.size()];
        const std::uint64_t seed = seeds[j % seeds.size()];
        UplinkParams params = ul;
        params.aerial_pool_rbs =
            std::clamp(static_cast<int>(std::llround(f * ul.n_rb)), 1, ul.n_rb - 1);
        runs[j] = run_ul_sim(layout, pattern, channel, params, traffic, aerial_altitude_m,
                             aerial_ratio, per_cell, seed);
    });

    std::vector<PartitionRow> rows;
    for (std::size_t g = 0; g < fractions.size(); ++g) {
        PartitionRow row;
        row.aerial_rb_fraction = fractions[g];
        row.aerial_pool_rbs =
            std::clamp(static_cast<int>(std::llround(fractions[g] * ul.n_rb)), 1, ul.n_rb - 1);
        double apru = 0, tpru = 0, a_t = 0, t_t = 0;
        for (std::size_t s = 0; s < seeds.size(); ++s) {
            const UlRunResult& r = runs[g * seeds.size() + s];
            apru += r.aerial_pool_ru;
            tpru += r.terrestrial_pool_ru;
            a_t += r.aerial.mean_tput_bps;
            t_t += r.terrestrial.mean_tput_bps;
            row.saturated = row.saturated || r.saturated;
        }
        const double n = static_cast<double>(seeds.size());
        row.aerial_pool_ru = apru / n;
        row.terrestrial_pool_ru = tpru / n;
        row.pool_ru_gap = row.terrestrial_pool_ru - row.aerial_pool_ru;
        row.aerial_mean_tput_bps = a_t / n;
        row.terrestrial_mean_tput_bps = t_t / n;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace skysim
