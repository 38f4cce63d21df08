// SPDX-License-Identifier: Apache-2.0
//
// skysim - system-level simulator of cellular service to low-altitude aerial users
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "skysim/downlink.hpp"

#include <algorithm>

#include "skysim/parallel.hpp"
#include "skysim/rng.hpp"

namespace skysim {

double compute_dl_sinr_db(int serving_cell, std::span<const LinkState> links, double ru,
                          double tx_power_dbm, double noise_dbm) {
    double signal_mw = 0.0;
    double interference_mw = 0.0;
    for (const LinkState& l : links) {
        const double rx_mw = db_to_linear(tx_power_dbm + l.coupling_gain_db);
        if (l.cell == serving_cell)
            signal_mw = rx_mw;
        else
            interference_mw += rx_mw;
    }
    return linear_to_db(signal_mw / (ru * interference_mw + db_to_linear(noise_dbm)));
}

namespace {

struct SeedAltitudeResult {
    std::vector<UeDownlinkSample> samples;
};

SeedAltitudeResult run_one_drop(const NetworkLayout& layout, const AntennaPattern& pattern,
                                const ChannelParams& channel, const DownlinkParams& dl,
                                double altitude_m, int per_cell, std::uint64_t seed) {
    const double noise_dbm = noise_floor_dbm(dl.bandwidth_mhz * 1e6, dl.ue_noise_figure_db);
    // Single-altitude census: every UE at the same height. Positions depend
    // only on (seed, cell, index), so drops are identical across altitudes.
    const std::vector<UserTerminal> ues = drop_ues(layout, per_cell, {altitude_m}, 1.0, seed);

    // Optional on/off interference mode: each cell active with probability ru.
    std::vector<bool> cell_active(static_cast<std::size_t>(layout.n_cells()), true);
    if (dl.bernoulli_interference) {
        auto rng = keyed_stream({seed, rngtag::kInterferenceOnOff});
        for (std::size_t c = 0; c < cell_active.size(); ++c)
            cell_active[c] = rng.uniform() < dl.resource_utilization;
    }

    SeedAltitudeResult result;
    result.samples.reserve(ues.size());
    std::vector<LinkState> links(static_cast<std::size_t>(layout.n_cells()));
    for (const UserTerminal& ue : ues) {
        for (const Cell& cell : layout.cells)
            links[static_cast<std::size_t>(cell.id)] =
                coupling_gain(layout, pattern, ue, cell, channel, seed, /*drop=*/0);
        const int serving = select_serving_cell(links);

        UeDownlinkSample s;
        s.ue = ue.id;
        s.kind = ue.kind;
        s.serving_cell = serving;
        s.coupling_gain_db = links[static_cast<std::size_t>(serving)].coupling_gain_db;
        if (dl.bernoulli_interference) {
            double signal_mw = 0.0, interference_mw = 0.0;
            for (const LinkState& l : links) {
                const double rx = db_to_linear(dl.tx_power_dbm + l.coupling_gain_db);
                if (l.cell == serving)
                    signal_mw = rx;
                else if (cell_active[static_cast<std::size_t>(l.cell)])
                    interference_mw += rx;
            }
            s.sinr_db = linear_to_db(signal_mw / (interference_mw + db_to_linear(noise_dbm)));
        } else {
            s.sinr_db = compute_dl_sinr_db(serving, links, dl.resource_utilization,
                                           dl.tx_power_dbm, noise_dbm);
        }
        result.samples.push_back(s);
    }
    return result;
}

}  // namespace

std::vector<DownlinkSnapshot> run_dl_analysis(const NetworkLayout& layout,
                                              const AntennaPattern& pattern,
                                              const ChannelParams& channel,
                                              const DownlinkParams& dl,
                                              const std::vector<double>& altitudes_m, int per_cell,
                                              const std::vector<std::uint64_t>& seeds,
                                              int workers) {
    if (seeds.empty()) throw ConfigError("seed list must not be empty");
    if (altitudes_m.empty()) throw ConfigError("altitudes list must not be empty");

    // One job per (altitude, seed); merged in job order so results are
    // independent of scheduling.
    const std::size_t n_jobs = altitudes_m.size() * seeds.size();
    std::vector<SeedAltitudeResult> jobs(n_jobs);
    parallel_over(n_jobs, workers, [&](std::size_t j) {
        const std::size_t a = j / seeds.size();
        const std::size_t s = j % seeds.size();
        jobs[j] = run_one_drop(layout, pattern, channel, dl, altitudes_m[a], per_cell, seeds[s]);
    });

    std::vector<DownlinkSnapshot> snapshots;
    for (std::size_t a = 0; a < altitudes_m.size(); ++a) {
        DownlinkSnapshot snap;
        snap.altitude_m = altitudes_m[a];
        snap.resource_utilization = dl.resource_utilization;
        for (std::size_t s = 0; s < seeds.size(); ++s) {
            const auto& job = jobs[a * seeds.size() + s];
            snap.samples.insert(snap.samples.end(), job.samples.begin(), job.samples.end());
        }
        snap.coupling_cdf.reserve(snap.samples.size());
        snap.sinr_cdf.reserve(snap.samples.size());
        for (const auto& s : snap.samples) {
            snap.coupling_cdf.push_back(s.coupling_gain_db);
            snap.sinr_cdf.push_back(s.sinr_db);
        }
        std::sort(snap.coupling_cdf.begin(), snap.coupling_cdf.end());
        std::sort(snap.sinr_cdf.begin(), snap.sinr_cdf.end());
        snapshots.push_back(std::move(snap));
    }
    return snapshots;
}

CoverageReport coverage_check(const DownlinkSnapshot& snapshot, double bandwidth_hz) {
    CoverageReport report;
    report.altitude_m = snapshot.altitude_m;
    const auto n = static_cast<double>(snapshot.sinr_cdf.size());
    if (n == 0) return report;
    double above6 = 0, above10 = 0, rate_ok = 0;
    for (double sinr : snapshot.sinr_cdf) {
        if (sinr >= kSinrFloorRelease12Db) above6 += 1;
        if (sinr >= kSinrFloorEnhancedDb) above10 += 1;
        if (attenuated_shannon_rate_bps(sinr, bandwidth_hz) >= kC2RateFloorBps) rate_ok += 1;
    }
    report.fraction_sinr_above_m6 = above6 / n;
    report.fraction_sinr_above_m10 = above10 / n;
    report.fraction_rate_above_c2 = rate_ok / n;
    return report;
}

}  // namespace skysim
