// SPDX-License-Identifier: Apache-2.0
//
// skysim - system-level simulator of cellular service to low-altitude aerial users
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "skysim/uplink.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "skysim/antenna.hpp"
#include "skysim/link.hpp"
#include "skysim/rng.hpp"

namespace skysim {

double ul_tx_power_dbm(const PowerControlConfig& pc, int n_rb, double pathloss_db) {
    if (n_rb < 1) throw std::invalid_argument("n_rb must be >= 1");
    return std::min(pc.p_max_dbm, pc.p0_dbm + 10.0 * std::log10(static_cast<double>(n_rb)) +
                                      pc.alpha * pathloss_db);
}

double ul_sinr_db(double tx_power_per_rb_dbm, double coupling_to_serving_db,
                  std::span<const UlInterferer> co_scheduled, double noise_per_rb_dbm) {
    const double signal_mw = db_to_linear(tx_power_per_rb_dbm + coupling_to_serving_db);
    double interference_mw = 0.0;
    for (const UlInterferer& i : co_scheduled)
        interference_mw += db_to_linear(i.tx_power_per_rb_dbm + i.coupling_to_victim_db);
    return linear_to_db(signal_mw / (interference_mw + db_to_linear(noise_per_rb_dbm)));
}

namespace {

struct FileJob {
    double bits_left;
    double arrival_s;
    double size_bits;
};

struct UeState {
    int serving = 0;
    UeKind kind = UeKind::terrestrial;
    double coupling_loss_db = 0.0;  // to the serving cell
    std::deque<FileJob> queue;
    double ema_tput = 1.0;  // proportional-fair average, bits per TTI
};

struct Grant {
    int ue;      // global UE index
    int rb0;     // first RB
    int n_rb;    // length
    double p_rb_mw;
};

struct GroupAccumulator {
    std::vector<double> tputs;

    UlGroupMetrics finish() {
        UlGroupMetrics m;
        m.files_completed = static_cast<std::int64_t>(tputs.size());
        if (!tputs.empty()) {
            m.mean_tput_bps = mean(tputs);
            std::sort(tputs.begin(), tputs.end());
            m.p05_tput_bps = percentile_sorted(tputs, 0.05);
        }
        m.tputs = std::move(tputs);
        return m;
    }
};

// Round-robin split of a contiguous RB pool among the backlogged members, one
// RB granularity, rotating both the remainder and the RB placement.
void schedule_pool(const std::vector<int>& backlogged, int pool_start, int pool_size, int rot,
                   std::vector<UeState>& ues, const PowerControlConfig& pc_terr,
                   const PowerControlConfig& pc_aerial, std::vector<Grant>& out) {
    const int nb = static_cast<int>(backlogged.size());
    if (nb == 0 || pool_size == 0) return;
    const int n_served = std::min(nb, pool_size);
    const int base = pool_size / nb;
    const int extra = pool_size % nb;
    int rb = pool_start;
    for (int k = 0; k < n_served; ++k) {
        const int ue = backlogged[static_cast<std::size_t>((k + rot) % nb)];
        const int len = base > 0 ? base + (k < extra ? 1 : 0) : 1;
        const UeState& st = ues[static_cast<std::size_t>(ue)];
        const PowerControlConfig& pc = st.kind == UeKind::aerial ? pc_aerial : pc_terr;
        const double tx_dbm = ul_tx_power_dbm(pc, len, st.coupling_loss_db);
        Grant g;
        g.ue = ue;
        g.rb0 = rb;
        g.n_rb = len;
        g.p_rb_mw = db_to_linear(tx_dbm - 10.0 * std::log10(static_cast<double>(len)));
        out.push_back(g);
        rb += len;
    }
}

}  // namespace

UlRunResult run_ul_sim(const NetworkLayout& layout, const AntennaPattern& pattern,
                       const ChannelParams& channel, const UplinkParams& ul,
                       const TrafficModel& traffic, double aerial_altitude_m, double aerial_ratio,
                       int per_cell, std::uint64_t seed) {
    traffic.validate();
    ul.pc_terrestrial.validate();
    ul.pc_aerial.validate();
    if (ul.aerial_pool_rbs > ul.n_rb) throw ConfigError("aerial pool larger than the carrier");

    const int n_cells = layout.n_cells();
    const std::vector<UserTerminal> terminals =
        drop_ues(layout, per_cell, {aerial_altitude_m}, aerial_ratio, seed);
    const int n_ues = static_cast<int>(terminals.size());

    const bool partitioned = ul.aerial_pool_rbs >= 0;
    if (partitioned) {
        const int n_aerial =
            static_cast<int>(std::count_if(terminals.begin(), terminals.end(),
                                           [](const auto& u) { return u.kind == UeKind::aerial; }));
        if (ul.aerial_pool_rbs == 0 && n_aerial > 0 && traffic.arrival_rate_files_per_s > 0.0)
            throw ConfigError("aerial resource pool is empty but aerial traffic is offered");
        if (ul.aerial_pool_rbs == ul.n_rb && n_aerial < n_ues &&
            traffic.arrival_rate_files_per_s > 0.0)
            throw ConfigError("terrestrial resource pool is empty but terrestrial traffic is offered");
    }

    // Linear coupling gain of every UE at every BS, plus serving association.
    std::vector<double> gain_mw(static_cast<std::size_t>(n_ues) * static_cast<std::size_t>(n_cells));
    std::vector<UeState> ues(static_cast<std::size_t>(n_ues));
    std::vector<std::vector<int>> served_by(static_cast<std::size_t>(n_cells));
    std::vector<std::vector<int>> dropped_in(static_cast<std::size_t>(n_cells));
    {
        std::vector<LinkState> links(static_cast<std::size_t>(n_cells));
        for (int u = 0; u < n_ues; ++u) {
            const UserTerminal& ue = terminals[static_cast<std::size_t>(u)];
            for (const Cell& cell : layout.cells) {
                links[static_cast<std::size_t>(cell.id)] =
                    coupling_gain(layout, pattern, ue, cell, channel, seed, 0);
                gain_mw[static_cast<std::size_t>(u) * static_cast<std::size_t>(n_cells) +
                        static_cast<std::size_t>(cell.id)] =
                    db_to_linear(links[static_cast<std::size_t>(cell.id)].coupling_gain_db);
            }
            const int serving = select_serving_cell(links);
            UeState& st = ues[static_cast<std::size_t>(u)];
            st.serving = serving;
            st.kind = ue.kind;
            st.coupling_loss_db = -links[static_cast<std::size_t>(serving)].coupling_gain_db;
            served_by[static_cast<std::size_t>(serving)].push_back(u);
            dropped_in[static_cast<std::size_t>(ue.drop_cell)].push_back(u);
        }
    }

    const double noise_rb_mw = db_to_linear(noise_floor_dbm(ul.rb_bandwidth_hz, ul.bs_noise_figure_db));
    const double t_end = ul.warmup_s + ul.sim_s;
    const auto n_ttis = static_cast<std::int64_t>(std::llround(t_end / ul.tti_s));
    const auto warmup_ttis = static_cast<std::int64_t>(std::llround(ul.warmup_s / ul.tti_s));

    // Per-cell Poisson arrival streams; each file lands on a uniformly random
    // UE dropped in that cell.
    std::vector<SplitMix64> arrival_rng;
    std::vector<double> next_arrival(static_cast<std::size_t>(n_cells),
                                     std::numeric_limits<double>::infinity());
    arrival_rng.reserve(static_cast<std::size_t>(n_cells));
    for (int c = 0; c < n_cells; ++c) {
        arrival_rng.push_back(keyed_stream({seed, rngtag::kArrival, static_cast<std::uint64_t>(c)}));
        if (traffic.arrival_rate_files_per_s > 0.0)
            next_arrival[static_cast<std::size_t>(c)] =
                arrival_rng.back().exponential(traffic.arrival_rate_files_per_s);
    }

    std::vector<int> rot(static_cast<std::size_t>(n_cells), 0);
    std::vector<std::vector<Grant>> grants(static_cast<std::size_t>(n_cells));
    std::vector<double> interference(static_cast<std::size_t>(ul.n_rb) *
                                     static_cast<std::size_t>(n_cells));
    std::vector<int> backlogged;

    UlRunResult result;
    result.offered_load_bps = traffic.offered_load_bps();
    result.altitude_m = aerial_altitude_m;
    result.per_cell_ru.assign(static_cast<std::size_t>(n_cells), 0.0);

    GroupAccumulator acc_all, acc_aerial, acc_terrestrial;
    double backlog_at_warmup = 0.0;
    double arrived_bits_measurement = 0.0;
    double iot_sum_db = 0.0;
    std::int64_t iot_samples = 0;
    std::int64_t measured_ttis = 0;
    double aerial_pool_granted = 0.0, terrestrial_pool_granted = 0.0;
    const double file_bits = traffic.file_size_bytes * 8.0;

    std::vector<std::uint8_t> rb_owner;  // validator scratch
    double total_backlog_bits = 0.0;

    for (std::int64_t tti = 0; tti < n_ttis; ++tti) {
        const double t = static_cast<double>(tti) * ul.tti_s;
        const bool measuring = tti >= warmup_ttis;
        if (tti == warmup_ttis) backlog_at_warmup = total_backlog_bits;

        // Arrivals due in this TTI.
        for (int c = 0; c < n_cells; ++c) {
            auto& next = next_arrival[static_cast<std::size_t>(c)];
            while (next < t + ul.tti_s) {
                const auto& members = dropped_in[static_cast<std::size_t>(c)];
                if (!members.empty()) {
                    const int u = members[arrival_rng[static_cast<std::size_t>(c)].uniform_index(
                        members.size())];
                    ues[static_cast<std::size_t>(u)].queue.push_back({file_bits, next, file_bits});
                    total_backlog_bits += file_bits;
                    if (measuring) arrived_bits_measurement += file_bits;
                }
                next += arrival_rng[static_cast<std::size_t>(c)].exponential(
                    traffic.arrival_rate_files_per_s);
            }
        }

        // Schedule every cell.
        for (int c = 0; c < n_cells; ++c) {
            auto& cell_grants = grants[static_cast<std::size_t>(c)];
            cell_grants.clear();
            const auto& members = served_by[static_cast<std::size_t>(c)];
            if (members.empty()) continue;

            auto collect = [&](UeKind kind, bool any_kind) {
                backlogged.clear();
                for (int u : members) {
                    const UeState& st = ues[static_cast<std::size_t>(u)];
                    if (!st.queue.empty() && (any_kind || st.kind == kind))
                        backlogged.push_back(u);
                }
            };

            if (ul.scheduler == UlScheduler::proportional_fair && !partitioned) {
                collect(UeKind::terrestrial, true);
                if (!backlogged.empty()) {
                    int best = backlogged.front();
                    double best_metric = -1.0;
                    for (int u : backlogged) {
                        const double m = 1.0 / ues[static_cast<std::size_t>(u)].ema_tput;
                        if (m > best_metric) {
                            best_metric = m;
                            best = u;
                        }
                    }
                    const UeState& st = ues[static_cast<std::size_t>(best)];
                    const PowerControlConfig& pc =
                        st.kind == UeKind::aerial ? ul.pc_aerial : ul.pc_terrestrial;
                    const double tx = ul_tx_power_dbm(pc, ul.n_rb, st.coupling_loss_db);
                    cell_grants.push_back(
                        {best, 0, ul.n_rb,
                         db_to_linear(tx - 10.0 * std::log10(static_cast<double>(ul.n_rb)))});
                }
            } else if (!partitioned) {
                collect(UeKind::terrestrial, true);
                schedule_pool(backlogged, 0, ul.n_rb, rot[static_cast<std::size_t>(c)], ues,
                              ul.pc_terrestrial, ul.pc_aerial, cell_grants);
            } else {
                collect(UeKind::aerial, false);
                schedule_pool(backlogged, 0, ul.aerial_pool_rbs, rot[static_cast<std::size_t>(c)],
                              ues, ul.pc_terrestrial, ul.pc_aerial, cell_grants);
                collect(UeKind::terrestrial, false);
                schedule_pool(backlogged, ul.aerial_pool_rbs, ul.n_rb - ul.aerial_pool_rbs,
                              rot[static_cast<std::size_t>(c)], ues, ul.pc_terrestrial,
                              ul.pc_aerial, cell_grants);
            }
            rot[static_cast<std::size_t>(c)] += 1;
        }

        // Conservation validator: every grant inside its pool, no RB granted
        // twice, work-conserving whenever the cell has backlog.
        if (ul.validate_grants) {
            rb_owner.assign(static_cast<std::size_t>(ul.n_rb), 0);
            for (int c = 0; c < n_cells; ++c) {
                std::fill(rb_owner.begin(), rb_owner.end(), 0);
                int granted = 0;
                for (const Grant& g : grants[static_cast<std::size_t>(c)]) {
                    for (int r = g.rb0; r < g.rb0 + g.n_rb; ++r) {
                        result.grant_checks += 1;
                        if (r < 0 || r >= ul.n_rb || rb_owner[static_cast<std::size_t>(r)])
                            result.grant_violations += 1;
                        else
                            rb_owner[static_cast<std::size_t>(r)] = 1;
                    }
                    granted += g.n_rb;
                    if (partitioned) {
                        const bool is_aerial =
                            ues[static_cast<std::size_t>(g.ue)].kind == UeKind::aerial;
                        const bool in_pool = is_aerial
                                                 ? g.rb0 + g.n_rb <= ul.aerial_pool_rbs
                                                 : g.rb0 >= ul.aerial_pool_rbs;
                        result.grant_checks += 1;
                        if (!in_pool) result.grant_violations += 1;
                    }
                }
                if (granted > ul.n_rb) result.grant_violations += 1;
                if (!partitioned) {
                    bool has_backlog = false;
                    for (int u : served_by[static_cast<std::size_t>(c)])
                        if (!ues[static_cast<std::size_t>(u)].queue.empty()) has_backlog = true;
                    result.grant_checks += 1;
                    if (has_backlog && granted != ul.n_rb) result.grant_violations += 1;
                }
            }
        }

        // Received interference at every BS on every RB (includes each cell's
        // own signal; subtracted at use).
        std::fill(interference.begin(), interference.end(), 0.0);
        for (int c = 0; c < n_cells; ++c) {
            for (const Grant& g : grants[static_cast<std::size_t>(c)]) {
                const double* gu =
                    &gain_mw[static_cast<std::size_t>(g.ue) * static_cast<std::size_t>(n_cells)];
                for (int r = g.rb0; r < g.rb0 + g.n_rb; ++r) {
                    double* row = &interference[static_cast<std::size_t>(r) *
                                                static_cast<std::size_t>(n_cells)];
                    for (int v = 0; v < n_cells; ++v) row[v] += g.p_rb_mw * gu[v];
                }
            }
        }

        // Serve the grants.
        for (int c = 0; c < n_cells; ++c) {
            double granted_here = 0.0;
            for (const Grant& g : grants[static_cast<std::size_t>(c)]) {
                UeState& st = ues[static_cast<std::size_t>(g.ue)];
                const double signal_mw =
                    g.p_rb_mw * gain_mw[static_cast<std::size_t>(g.ue) *
                                            static_cast<std::size_t>(n_cells) +
                                        static_cast<std::size_t>(c)];
                double bits = 0.0;
                for (int r = g.rb0; r < g.rb0 + g.n_rb; ++r) {
                    const double other = std::max(
                        interference[static_cast<std::size_t>(r) * static_cast<std::size_t>(n_cells) +
                                     static_cast<std::size_t>(c)] -
                            signal_mw,
                        0.0);
                    const double sinr_db = linear_to_db(signal_mw / (noise_rb_mw + other));
                    bits += attenuated_shannon_rate_bps(sinr_db, ul.rb_bandwidth_hz) * ul.tti_s;
                }
                if (ul.scheduler == UlScheduler::proportional_fair)
                    st.ema_tput = 0.99 * st.ema_tput + 0.01 * bits;
                granted_here = granted_here + static_cast<double>(g.n_rb);

                // Drain the queue head-first.
                while (bits > 0.0 && !st.queue.empty()) {
                    FileJob& f = st.queue.front();
                    const double served = std::min(bits, f.bits_left);
                    f.bits_left -= served;
                    bits -= served;
                    total_backlog_bits -= served;
                    if (f.bits_left <= 0.0) {
                        const double done_t = t + ul.tti_s;
                        if (measuring && f.arrival_s >= ul.warmup_s) {
                            const double tput = f.size_bits / (done_t - f.arrival_s);
                            acc_all.tputs.push_back(tput);
                            (st.kind == UeKind::aerial ? acc_aerial : acc_terrestrial)
                                .tputs.push_back(tput);
                        }
                        st.queue.pop_front();
                    }
                }
            }
            if (measuring) {
                result.per_cell_ru[static_cast<std::size_t>(c)] += granted_here;
                if (partitioned) {
                    for (const Grant& g : grants[static_cast<std::size_t>(c)]) {
                        if (ues[static_cast<std::size_t>(g.ue)].kind == UeKind::aerial)
                            aerial_pool_granted += g.n_rb;
                        else
                            terrestrial_pool_granted += g.n_rb;
                    }
                }
            }
        }

        // Interference-over-thermal census (own-cell signal excluded).
        if (measuring) {
            measured_ttis += 1;
            for (int v = 0; v < n_cells; ++v) {
                double i_sum = 0.0;
                for (int r = 0; r < ul.n_rb; ++r)
                    i_sum += interference[static_cast<std::size_t>(r) *
                                              static_cast<std::size_t>(n_cells) +
                                          static_cast<std::size_t>(v)];
                for (const Grant& g : grants[static_cast<std::size_t>(v)])
                    i_sum -= static_cast<double>(g.n_rb) * g.p_rb_mw *
                             gain_mw[static_cast<std::size_t>(g.ue) *
                                         static_cast<std::size_t>(n_cells) +
                                     static_cast<std::size_t>(v)];
                i_sum = std::max(i_sum, 0.0) / static_cast<double>(ul.n_rb);
                iot_sum_db += linear_to_db((noise_rb_mw + i_sum) / noise_rb_mw);
                iot_samples += 1;
            }
        }
    }

    const double denom = static_cast<double>(measured_ttis) * static_cast<double>(ul.n_rb);
    double ru_sum = 0.0;
    for (double& ru : result.per_cell_ru) {
        ru /= denom;
        ru_sum += ru;
    }
    result.mean_ru = ru_sum / static_cast<double>(n_cells);
    if (partitioned) {
        const double at = static_cast<double>(measured_ttis) *
                          static_cast<double>(std::max(ul.aerial_pool_rbs, 1)) *
                          static_cast<double>(n_cells);
        const double tt = static_cast<double>(measured_ttis) *
                          static_cast<double>(std::max(ul.n_rb - ul.aerial_pool_rbs, 1)) *
                          static_cast<double>(n_cells);
        result.aerial_pool_ru = aerial_pool_granted / at;
        result.terrestrial_pool_ru = terrestrial_pool_granted / tt;
    }
    result.mean_iot_db = iot_samples > 0 ? iot_sum_db / static_cast<double>(iot_samples) : 0.0;
    result.all = acc_all.finish();
    result.aerial = acc_aerial.finish();
    result.terrestrial = acc_terrestrial.finish();

    const double backlog_growth = total_backlog_bits - backlog_at_warmup;
    result.saturated = result.mean_ru > 0.98 ||
                       (arrived_bits_measurement > 0.0 &&
                        backlog_growth > 0.2 * arrived_bits_measurement);
    return result;
}

}  // namespace skysim
