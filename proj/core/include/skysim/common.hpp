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
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace skysim {

inline constexpr double kSpeedOfLight = 299792458.0;       // m/s
inline constexpr double kThermalNoiseDbmHz = -174.0;       // dBm/Hz at 290 K
inline constexpr double kDegToRad = std::numbers::pi / 180.0;
inline constexpr double kRadToDeg = 180.0 / std::numbers::pi;

/// Configuration rejected (bad key, bad value, violated cross-field constraint).
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Input outside a statistical model's domain of validity.
class ModelDomainError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file.
class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
};

inline double distance2d(Vec2 a, Vec2 b) { return (a - b).norm(); }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

/// Wrap an angle into (-180, 180].
inline double wrap180(double deg) {
    double a = std::fmod(deg + 180.0, 360.0);
    if (a <= 0.0) a += 360.0;
    return a - 180.0;
}

/// Fold a zenith angle into [0, 180] by reflection at the poles.
inline double fold_zenith(double deg) {
    double a = std::fmod(deg, 360.0);
    if (a < 0.0) a += 360.0;
    return a > 180.0 ? 360.0 - a : a;
}

/// Linear-interpolated percentile of a sorted sample, p in [0, 1].
inline double percentile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("percentile of empty sample");
    if (sorted.size() == 1) return sorted.front();
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

inline double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace skysim
