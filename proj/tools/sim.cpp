// SPDX-License-Identifier: Apache-2.0
//
// skysim - system-level simulator of cellular service to low-altitude aerial users
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "skysim/experiments.hpp"

namespace {

int default_workers() {
    if (const char* env = std::getenv("SKYSIM_WORKERS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"skysim - cellular network simulator for low-altitude aerial terminals"};
    app.require_subcommand(1);

    const char* const experiments[] = {"dl_cdf",    "ul_sweep",  "pc_sweep",
                                       "partition", "los_curve", "pathloss_curves",
                                       "fragmentation", "handover", "aerial_id"};
    const char* const descriptions[] = {
        "downlink coupling-gain and SINR distributions per altitude",
        "uplink throughput and resource utilization versus offered load",
        "uplink power-control parameter sweep",
        "orthogonal resource partitioning between aerial and terrestrial traffic",
        "empirical LOS probability curves from a heightmap",
        "reference pathloss curve tables",
        "serving-area fragmentation versus altitude",
        "trajectory handover trace",
        "aerial-terminal identification from received-power profiles"};

    std::string config_path;
    std::string out_dir;
    bool dry_run = false;
    int workers = default_workers();

    for (std::size_t i = 0; i < std::size(experiments); ++i) {
        CLI::App* sub = app.add_subcommand(experiments[i], descriptions[i]);
        sub->add_option("--config", config_path, "run configuration file")->required();
        sub->add_option("--out", out_dir, "output directory")->required();
        sub->add_flag("--dry-run", dry_run, "validate the configuration and exit");
        sub->add_option("--workers", workers, "worker thread count");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const skysim::RunConfig config = skysim::parse_config(config_path);
        const skysim::Experiment experiment =
            skysim::experiment_from_name(app.get_subcommands().front()->get_name());
        const skysim::RunOutcome outcome =
            skysim::run_experiment(config, experiment, out_dir, workers, dry_run);
        if (outcome.dry_run) {
            std::cout << "configuration ok\n";
        } else {
            for (const auto& e : outcome.manifest.entries)
                std::cout << "wrote " << out_dir << "/" << e.file << "\n";
        }
        return 0;
    } catch (const skysim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
