// SPDX-License-Identifier: Apache-2.0
//
// skysim - system-level simulator of cellular service to low-altitude aerial users
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <array>
#include <vector>

#include "skysim/common.hpp"

namespace skysim {

/// Base-station antenna: parabolic sector element stacked into an M-row
/// vertical uniform linear array. Downtilt shifts the whole synthesized
/// pattern in elevation, so the composite peak of element_max_gain +
/// 10*log10(M) sits exactly at the downtilt direction. The two cross-polarized
/// ports carry identical power patterns, so polarizations only affects port
/// count, never the shape.
struct AntennaArrayConfig {
    int m_rows = 8;
    int n_cols = 1;
    int polarizations = 2;
    double vertical_spacing_wl = 0.8;
    double downtilt_deg = 6.0;
    double element_max_gain_dbi = 8.0;
    double element_hpbw_v_deg = 65.0;
    double element_hpbw_h_deg = 65.0;
    double element_sla_v_db = 30.0;
    double element_fbr_db = 30.0;  // front-to-back ratio A_m

    void validate() const;
};

/// Single-element gain: G_max - min(-(A_V(theta) + A_H(phi)), A_m) with
/// parabolic vertical/horizontal rolloffs. theta is the zenith angle
/// (90 = horizon), phi the azimuth off boresight. Angles are normalized.
double element_gain_dbi(double theta_deg, double phi_deg, const AntennaArrayConfig& cfg);

/// Broadside array factor of the M-element vertical ULA, equal amplitudes
/// 1/sqrt(M), in dB. Peaks at 10*log10(M) on the horizon.
double array_factor_db(double theta_deg, const AntennaArrayConfig& cfg);

/// Synthesized composite gain with downtilt applied: the broadside
/// element+array pattern evaluated at the tilted elevation. For m_rows == 1
/// and zero downtilt this reduces to element_gain_dbi at all angles.
double array_gain_dbi(double theta_deg, double phi_deg, const AntennaArrayConfig& cfg);

/// Dense 1-degree sampled pattern with bilinear interpolation between samples.
class AntennaPattern {
  public:
    static AntennaPattern synthesize(const AntennaArrayConfig& cfg);

    double gain_dbi(double theta_deg, double phi_deg) const;
    double max_gain_dbi() const { return max_gain_dbi_; }
    const AntennaArrayConfig& config() const { return cfg_; }

    /// Rows (theta_deg, phi_deg, gain_dbi) over the full sampled grid.
    std::vector<std::array<double, 3>> sampled_rows() const;

  private:
    AntennaArrayConfig cfg_;
    std::vector<double> table_;  // (181 theta) x (361 phi), row-major in theta
    double max_gain_dbi_ = 0.0;

    double at(int t, int p) const { return table_[static_cast<std::size_t>(t) * 361 + static_cast<std::size_t>(p)]; }
};

}  // namespace skysim
