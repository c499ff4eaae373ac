/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "jumm/cli.hpp"

namespace {

template <typename T>
void bind_optional(CLI::App* cmd, const std::string& flag, std::optional<T>& target, const std::string& help)
{
    cmd->add_option_function<T>(flag, [&target](const T& v) { target = v; }, help);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Joint unicast and multigroup multicast power allocation for massive MIMO"};
    app.require_subcommand(1);

    jumm::RunOptions options;
    const char* commands[][2] = {
        {"pareto", "sweep the power split and write the Pareto boundary"},
        {"mmf", "max-min fair multicast allocation for a given P_un"},
        {"wsse", "weighted sum SE unicast allocation for a given P_mu"},
        {"validate", "Monte Carlo check of the analytic SINR expressions"},
        {"oracle-check", "compare closed forms with a brute-force grid search"},
    };
    for (const auto& [name, help] : commands) {
        auto* cmd = app.add_subcommand(name, help);
        bind_optional(cmd, "--config", options.config_path, "experiment JSON file");
        bind_optional(cmd, "--p-un", options.p_un, "unicast power (noise-normalized)");
        bind_optional(cmd, "--p-mu", options.p_mu, "multicast power (noise-normalized)");
        bind_optional(cmd, "--n", options.n_antennas, "number of BS antennas");
        bind_optional(cmd, "--points", options.points, "sweep points");
        bind_optional(cmd, "--seed", options.seed, "seed for the user drop and Monte Carlo");
        bind_optional(cmd, "--out", options.out_dir, "output directory");
        bind_optional(cmd, "--threads", options.threads, "worker threads (0 = all cores)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        jumm::detail::report_error(std::cerr, "usage", "", e.what());
        return jumm::kExitConfig;
    }

    const auto command = jumm::parse_command(app.get_subcommands().front()->get_name());
    return jumm::run(*command, options, std::cout, std::cerr);
}
