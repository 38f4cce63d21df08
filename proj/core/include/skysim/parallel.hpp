// SPDX-License-Identifier: Apache-2.0
//
// skysim - system-level simulator of cellular service to low-altitude aerial users
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace skysim {

/// Run fn(0..n_jobs-1) on up to `workers` threads. Jobs must write only to
/// their own output slot; callers merge in index order, so results never
/// depend on scheduling.
inline void parallel_over(std::size_t n_jobs, int workers,
                          const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || n_jobs <= 1) {
        for (std::size_t i = 0; i < n_jobs; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const auto n_threads = static_cast<std::size_t>(workers) < n_jobs
                               ? static_cast<std::size_t>(workers)
                               : n_jobs;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n_jobs; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace skysim
