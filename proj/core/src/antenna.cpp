// SPDX-License-Identifier: Apache-2.0
//
// skysim - system-level simulator of cellular service to low-altitude aerial users
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "skysim/antenna.hpp"

#include <cmath>

namespace skysim {

void AntennaArrayConfig::validate() const {
    if (m_rows < 1 || n_cols < 1 || polarizations < 1)
        throw ConfigError("antenna array dimensions must be >= 1");
    if (vertical_spacing_wl <= 0.0) throw ConfigError("vertical_spacing_wl must be positive");
    auto beamwidth_ok = [](double b) { return b > 0.0 && b < 180.0; };
    if (!beamwidth_ok(element_hpbw_v_deg) || !beamwidth_ok(element_hpbw_h_deg))
        throw ConfigError("element beamwidths must be in (0, 180) degrees");
    if (!std::isfinite(element_max_gain_dbi) || !std::isfinite(element_sla_v_db) ||
        !std::isfinite(element_fbr_db))
        throw ConfigError("antenna gains must be finite");
}

double element_gain_dbi(double theta_deg, double phi_deg, const AntennaArrayConfig& cfg) {
    const double theta = fold_zenith(theta_deg);
    const double phi = wrap180(phi_deg);
    const double av = std::min(
        12.0 * std::pow((theta - 90.0) / cfg.element_hpbw_v_deg, 2.0), cfg.element_sla_v_db);
    const double ah =
        std::min(12.0 * std::pow(phi / cfg.element_hpbw_h_deg, 2.0), cfg.element_fbr_db);
    return cfg.element_max_gain_dbi - std::min(av + ah, cfg.element_fbr_db);
}

double array_factor_db(double theta_deg, const AntennaArrayConfig& cfg) {
    const int m = cfg.m_rows;
    if (m <= 1) return 0.0;
    // |sum_m exp(j 2 pi d m cos(theta))|^2 / M = sin^2(M x)/sin^2(x) / M
    const double x =
        std::numbers::pi * cfg.vertical_spacing_wl * std::cos(fold_zenith(theta_deg) * kDegToRad);
    const double s = std::sin(x);
    double af;
    if (std::abs(s) < 1e-12) {
        af = static_cast<double>(m);  // coherent limit
    } else {
        const double n = std::sin(m * x);
        af = (n * n) / (s * s) / static_cast<double>(m);
    }
    return linear_to_db(std::max(af, 1e-30));
}

double array_gain_dbi(double theta_deg, double phi_deg, const AntennaArrayConfig& cfg) {
    const double t = fold_zenith(theta_deg - cfg.downtilt_deg);
    return element_gain_dbi(t, phi_deg, cfg) + array_factor_db(t, cfg);
}

AntennaPattern AntennaPattern::synthesize(const AntennaArrayConfig& cfg) {
    cfg.validate();
    AntennaPattern pat;
    pat.cfg_ = cfg;
    pat.table_.resize(181 * 361);
    pat.max_gain_dbi_ = -1e30;
    for (int t = 0; t <= 180; ++t) {
        for (int p = -180; p <= 180; ++p) {
            const double g = array_gain_dbi(static_cast<double>(t), static_cast<double>(p), cfg);
            pat.table_[static_cast<std::size_t>(t) * 361 + static_cast<std::size_t>(p + 180)] = g;
            pat.max_gain_dbi_ = std::max(pat.max_gain_dbi_, g);
        }
    }
    return pat;
}

double AntennaPattern::gain_dbi(double theta_deg, double phi_deg) const {
    const double theta = fold_zenith(theta_deg);
    const double phi = wrap180(phi_deg);
    const double tf = theta;
    const double pf = phi + 180.0;
    int t0 = static_cast<int>(tf);
    int p0 = static_cast<int>(pf);
    t0 = std::clamp(t0, 0, 179);
    p0 = std::clamp(p0, 0, 359);
    const double wt = tf - t0;
    const double wp = pf - p0;
    return at(t0, p0) * (1 - wt) * (1 - wp) + at(t0 + 1, p0) * wt * (1 - wp) +
           at(t0, p0 + 1) * (1 - wt) * wp + at(t0 + 1, p0 + 1) * wt * wp;
}

std::vector<std::array<double, 3>> AntennaPattern::sampled_rows() const {
    std::vector<std::array<double, 3>> rows;
    rows.reserve(table_.size());
    for (int t = 0; t <= 180; ++t)
        for (int p = -180; p <= 180; ++p)
            rows.push_back({static_cast<double>(t), static_cast<double>(p), at(t, p + 180)});
    return rows;
}

}  // namespace skysim
