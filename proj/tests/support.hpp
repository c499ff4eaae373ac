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

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "jumm/closed_form.hpp"
#include "jumm/rng.hpp"
#include "jumm/scenario.hpp"

namespace jumm::testing {

struct Instance {
    SystemConfig config;
    LargeScaleProfile profile;
};

struct InstanceLimits {
    std::size_t max_unicast = 20;
    std::size_t max_groups = 10;
    std::size_t max_group_size = 100;
    std::size_t max_antennas = 256;
};

inline double log_uniform(Rng& rng, double lo_exp, double hi_exp)
{
    return std::pow(10.0, std::uniform_real_distribution<double>(lo_exp, hi_exp)(rng));
}

inline std::size_t uniform_count(Rng& rng, std::size_t lo, std::size_t hi)
{
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Random instance with gains, powers and energies spread over several decades.
inline Instance random_instance(Rng& rng, const InstanceLimits& limits = {})
{
    Instance out;
    auto& c = out.config;
    c.n_antennas = uniform_count(rng, 1, limits.max_antennas);
    c.n_unicast = uniform_count(rng, 1, limits.max_unicast);
    c.n_groups = uniform_count(rng, 1, limits.max_groups);
    for (std::size_t g = 0; g < c.n_groups; ++g) {
        c.group_sizes.push_back(uniform_count(rng, 1, limits.max_group_size));
    }
    c.coherence_symbols = c.n_unicast + c.n_groups + uniform_count(rng, 1, 200);
    c.total_dl_power = log_uniform(rng, -1.0, 4.0);
    const double e_center = std::uniform_real_distribution<double>(-1.0, 4.0)(rng);
    for (std::size_t m = 0; m < c.n_unicast; ++m) {
        c.unicast_energy_budgets.push_back(log_uniform(rng, e_center - 1.0, e_center + 1.0));
        out.profile.beta.push_back(log_uniform(rng, -3.0, 1.0));
    }
    for (auto k : c.group_sizes) {
        auto& e = c.multicast_energy_budgets.emplace_back();
        auto& eta = out.profile.eta.emplace_back();
        for (std::size_t i = 0; i < k; ++i) {
            e.push_back(log_uniform(rng, e_center - 1.0, e_center + 1.0));
            eta.push_back(log_uniform(rng, -3.0, 1.0));
        }
    }
    if (std::bernoulli_distribution(0.5)(rng)) {
        for (std::size_t m = 0; m < c.n_unicast; ++m) {
            c.unicast_weights.push_back(log_uniform(rng, -1.0, 1.0));
        }
    }
    return out;
}

/// Instance small enough for the brute-force oracle (U <= 3, G <= 2, K_g <= 2).
inline Instance tiny_instance(Rng& rng)
{
    return random_instance(rng, {3, 2, 2, 64});
}

inline double rel_diff(double a, double b)
{
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("jumm_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace jumm::testing
