// SPDX-License-Identifier: Apache-2.0
//
// skysim - system-level simulator of cellular service to low-altitude aerial users
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <string>

#include "skysim/config.hpp"
#include "skysim/results.hpp"

namespace skysim {

inline constexpr const char* kVersion = "0.1.0";

enum class Experiment {
    dl_cdf,
    ul_sweep,
    pc_sweep,
    partition,
    los_curve,
    pathloss_curves,
    fragmentation,
    handover,
    aerial_id,
};

Experiment experiment_from_name(const std::string& name);
const char* experiment_name(Experiment e);

struct RunOutcome {
    Manifest manifest;
    bool dry_run = false;
};

/// Dispatch one experiment: validates the experiment's config requirements,
/// computes its tables, and writes CSVs + manifest + metadata + model ledger
/// into out_dir. Identical (config, seeds) produce byte-identical CSVs.
/// dry_run validates without computing or writing.
RunOutcome run_experiment(const RunConfig& config, Experiment experiment,
                          const std::string& out_dir, int workers = 1, bool dry_run = false);

}  // namespace skysim
