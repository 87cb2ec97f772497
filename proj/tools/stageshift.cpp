/*
* Copyright (C) 2026 The stageshift authors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#include "cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"Two-stage cancer natural-history calibration and stage-shift projection"};
    app.set_version_flag("--version", STAGESHIFT_VERSION);

    stageshift::cli::RunOptions options;
    std::uint64_t seed = 0;
    app.add_option("command", options.command, "fit | project | sweep | mced | derive-inputs | simulate")
        ->required()
        ->check(CLI::IsMember({"fit", "project", "sweep", "mced", "derive-inputs", "simulate"}));
    app.add_option("--config", options.config, "JSON configuration file")->required();
    auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides the config)");
    app.add_option("--out", options.out_dir, "output directory")->capture_default_str();
    app.add_option("--threads", options.threads, "worker threads, 0 = all cores")->capture_default_str();

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : stageshift::cli::exit_usage;
    }
    if (*seed_opt) {
        options.seed = seed;
    }
    return stageshift::cli::run(options, std::cout, std::cerr);
}
