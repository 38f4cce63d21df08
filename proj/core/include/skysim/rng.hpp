// SPDX-License-Identifier: Apache-2.0
//
// skysim - system-level simulator of cellular service to low-altitude aerial users
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace skysim {

// Counter-free splitmix64. Every random quantity in the simulator is drawn from
// a stream keyed by the entities it belongs to, so results are independent of
// evaluation order and of how work is split across threads.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; consumes exactly two uniforms.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Exponential with the given rate (events per unit).
    double exponential(double rate) {
        double u = uniform();
        while (u <= 0.0) u = uniform();
        return -std::log(u) / rate;
    }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

  private:
    std::uint64_t state_;
};

inline std::uint64_t mix_u64(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL + (b << 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Stream keyed by an ordered tuple of identifiers (seed, drop, cell, ue, ...).
inline SplitMix64 keyed_stream(std::initializer_list<std::uint64_t> keys) {
    std::uint64_t h = 0x51ab7e2c93d5430fULL;
    for (std::uint64_t k : keys) h = mix_u64(h, k);
    return SplitMix64(h);
}

// Purpose tags keeping distinct random quantities on distinct streams.
namespace rngtag {
inline constexpr std::uint64_t kUeDrop = 1;
inline constexpr std::uint64_t kAerialPick = 2;
inline constexpr std::uint64_t kLos = 3;
inline constexpr std::uint64_t kShadowing = 4;
inline constexpr std::uint64_t kArrival = 5;
inline constexpr std::uint64_t kBsDrop = 6;
inline constexpr std::uint64_t kUePick = 7;
inline constexpr std::uint64_t kInterferenceOnOff = 8;
inline constexpr std::uint64_t kTrajectoryShadowing = 9;
}  // namespace rngtag

}  // namespace skysim
