// Copyright 2026 The evs-toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// evs_cli: batch driver for expectation value sampler experiments.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "evs/evs.hpp"

int main(int argc, char **argv) {
    CLI::App app{"Expectation value sampler experiments"};
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::string command;
    app.add_option("--config", config_path, "INI experiment config")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "seed (overrides the config)");
    app.add_option("--command", command, "fit | sample | w1 | analyze-rank | analyze-fourier | check");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? evs::kExitOk : evs::kExitValidation;
    }

    evs::ExperimentConfig config;
    try {
        config = evs::parse_config(config_path);
    } catch (const evs::ValidationError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return evs::kExitValidation;
    } catch (const std::exception &e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return evs::kExitRuntime;
    }
    if (seed) {
        config.seed = *seed;
    }
    if (command.empty()) {
        if (!config.command) {
            std::cerr << "error: no command given (use --command or the config key 'command')\n";
            return evs::kExitValidation;
        }
        command = *config.command;
    }

    const auto result = evs::execute(config, command, out_dir);
    if (result.exit_code == evs::kExitOk) {
        std::cout << command << ": " << result.message << "\n";
        for (const auto &p : result.artifacts) {
            std::cout << "  wrote " << p.string() << "\n";
        }
    }
    return result.exit_code;
}
