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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "jumm/error.hpp"
#include "jumm/rng.hpp"

/**
 * @file scenario.hpp
 * Single-cell scenario: static system parameters, user drop, distance-based
 * large-scale fading and conversion of physical quantities to
 * noise-normalized units.
 *
 * All powers and energies in SystemConfig are noise-normalized: a transmit
 * power q corresponds to q * sigma^2 * W watts, so the receiver noise has
 * unit variance in every SINR expression.
 */

namespace jumm {

/// Static parameters of the cell. Powers and energies are noise-normalized.
struct SystemConfig {
    std::size_t n_antennas = 0;                                ///< BS antennas
    std::size_t n_unicast = 0;                                 ///< unicast users
    std::size_t n_groups = 0;                                  ///< multicast groups
    std::vector<std::size_t> group_sizes;                      ///< members per group
    std::size_t coherence_symbols = 0;                         ///< symbols per coherence block
    double total_dl_power = 0.0;                               ///< downlink power budget
    std::vector<double> unicast_energy_budgets;                ///< pilot energy per unicast user
    std::vector<std::vector<double>> multicast_energy_budgets; ///< pilot energy per group member
    std::vector<double> unicast_weights;                       ///< sum-SE weights, empty = all 1
    std::optional<std::size_t> pilot_length;                   ///< empty = shortest feasible

    /// Orthogonal pilots needed: one per unicast user and one per group.
    std::size_t min_pilot_length() const noexcept { return n_unicast + n_groups; }

    std::size_t tau() const noexcept { return pilot_length.value_or(min_pilot_length()); }

    double weight(std::size_t m) const
    {
        return unicast_weights.empty() ? 1.0 : unicast_weights.at(m);
    }

    std::size_t n_multicast_users() const noexcept
    {
        std::size_t total = 0;
        for (auto k : group_sizes) {
            total += k;
        }
        return total;
    }

    /// Throws InvalidArgument naming the first broken invariant.
    void validate() const
    {
        using detail::require;
        require(n_antennas >= 1, "n_antennas must be positive");
        require(n_unicast >= 1, "n_unicast must be positive");
        require(n_groups >= 1, "n_groups must be positive");
        require(group_sizes.size() == n_groups, "group_sizes must have n_groups entries");
        for (auto k : group_sizes) {
            require(k >= 1, "every group needs at least one member");
        }
        require(coherence_symbols >= 1, "coherence_symbols must be positive");
        // P = 0 is accepted as a degenerate cell; the solvers return zero allocations.
        require(std::isfinite(total_dl_power) && total_dl_power >= 0.0,
                "total_dl_power must be finite and nonnegative");
        require(unicast_energy_budgets.size() == n_unicast,
                "unicast_energy_budgets must have n_unicast entries");
        for (double e : unicast_energy_budgets) {
            require(std::isfinite(e) && e > 0.0, "unicast energy budgets must be positive");
        }
        require(multicast_energy_budgets.size() == n_groups,
                "multicast_energy_budgets must have n_groups entries");
        for (std::size_t g = 0; g < n_groups; ++g) {
            require(multicast_energy_budgets[g].size() == group_sizes[g],
                    "multicast_energy_budgets[" + std::to_string(g) + "] size must match group size");
            for (double e : multicast_energy_budgets[g]) {
                require(std::isfinite(e) && e > 0.0, "multicast energy budgets must be positive");
            }
        }
        require(unicast_weights.empty() || unicast_weights.size() == n_unicast,
                "unicast_weights must be empty or have n_unicast entries");
        for (double a : unicast_weights) {
            require(std::isfinite(a) && a > 0.0, "unicast weights must be positive");
        }
        const auto t = tau();
        require(t >= min_pilot_length() && t <= coherence_symbols,
                "pilot_length must lie in [n_unicast + n_groups, coherence_symbols]");
    }
};

/// User distances from the base station, in meters.
struct CellGeometry {
    std::vector<double> unicast_distances;
    std::vector<std::vector<double>> multicast_distances;
    double cell_radius = 0.0;
    double exclusion_radius = 0.0;
};

/// Large-scale fading coefficients (linear scale).
struct LargeScaleProfile {
    std::vector<double> beta;              ///< unicast users
    std::vector<std::vector<double>> eta;  ///< multicast users, per group

    void validate(const SystemConfig& config) const
    {
        using detail::require;
        require(beta.size() == config.n_unicast, "beta must have n_unicast entries");
        for (double b : beta) {
            require(std::isfinite(b) && b > 0.0, "beta entries must be positive and finite");
        }
        require(eta.size() == config.n_groups, "eta must have n_groups entries");
        for (std::size_t g = 0; g < eta.size(); ++g) {
            require(eta[g].size() == config.group_sizes[g], "eta group size mismatch");
            for (double e : eta[g]) {
                require(std::isfinite(e) && e > 0.0, "eta entries must be positive and finite");
            }
        }
    }
};

/// Physical link budget before noise normalization.
struct PhysicalUnits {
    double bandwidth_hz = 20e6;
    double noise_psd_dbm_per_hz = -174.0;
    double dl_power_watts = 10.0;
    double pilot_energy_joules = 2e-6;
};

/// Distance-based path loss d_ref / x^exponent.
struct PathLossModel {
    double exponent = 3.76;
    double attenuation = 3.1622776601683794e-4; // 10^-3.5
};

inline constexpr double kDefaultCellRadius = 500.0;
inline constexpr double kDefaultExclusionRadius = 35.0;

/// Drops every user uniformly over the annulus [exclusion_radius, cell_radius].
///
/// Uniform in area: r = sqrt(u (R^2 - r0^2) + r0^2). Unicast users are drawn
/// first, then the groups in order, one uniform variate per user.
inline CellGeometry place_users(const SystemConfig& config, double cell_radius,
                                double exclusion_radius, std::uint64_t seed)
{
    detail::require(exclusion_radius >= 0.0 && exclusion_radius < cell_radius,
                    "place_users requires 0 <= exclusion_radius < cell_radius");
    detail::require(config.group_sizes.size() == config.n_groups,
                    "group_sizes must have n_groups entries");

    Rng rng = substream(seed, 0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const double r0_sq = exclusion_radius * exclusion_radius;
    const double span = cell_radius * cell_radius - r0_sq;
    auto draw = [&] {
        const double r = std::sqrt(uniform(rng) * span + r0_sq);
        return std::clamp(r, exclusion_radius, cell_radius);
    };

    CellGeometry geometry;
    geometry.cell_radius = cell_radius;
    geometry.exclusion_radius = exclusion_radius;
    geometry.unicast_distances.reserve(config.n_unicast);
    for (std::size_t m = 0; m < config.n_unicast; ++m) {
        geometry.unicast_distances.push_back(draw());
    }
    geometry.multicast_distances.resize(config.n_groups);
    for (std::size_t g = 0; g < config.n_groups; ++g) {
        auto& group = geometry.multicast_distances[g];
        group.reserve(config.group_sizes[g]);
        for (std::size_t k = 0; k < config.group_sizes[g]; ++k) {
            group.push_back(draw());
        }
    }
    return geometry;
}

inline double large_scale_fading(double distance, double pathloss_exponent = PathLossModel{}.exponent,
                                 double attenuation_const = PathLossModel{}.attenuation)
{
    detail::require(distance > 0.0 && std::isfinite(distance), "distance must be positive");
    return attenuation_const / std::pow(distance, pathloss_exponent);
}

inline LargeScaleProfile large_scale_profile(const CellGeometry& geometry,
                                             const PathLossModel& model = {})
{
    LargeScaleProfile profile;
    profile.beta.reserve(geometry.unicast_distances.size());
    for (double x : geometry.unicast_distances) {
        profile.beta.push_back(large_scale_fading(x, model.exponent, model.attenuation));
    }
    profile.eta.resize(geometry.multicast_distances.size());
    for (std::size_t g = 0; g < geometry.multicast_distances.size(); ++g) {
        for (double x : geometry.multicast_distances[g]) {
            profile.eta[g].push_back(large_scale_fading(x, model.exponent, model.attenuation));
        }
    }
    return profile;
}

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

struct NormalizedBudgets {
    double total_dl_power = 0.0; ///< P = P_watts / (W sigma^2)
    double energy_budget = 0.0;  ///< E = E_joules / sigma^2
};

/// Converts watts and joules to noise-normalized units.
///
/// Symbol duration is taken as 1/W: a normalized power q maps to q * sigma^2 * W
/// watts, and a tau-symbol pilot at power q then spends tau * q * sigma^2
/// joules, so the per-pilot energy budget normalizes to E_joules / sigma^2.
inline NormalizedBudgets normalize_units(const PhysicalUnits& phys)
{
    detail::require(phys.bandwidth_hz > 0.0, "bandwidth_hz must be positive");
    detail::require(phys.dl_power_watts > 0.0, "dl_power_watts must be positive");
    detail::require(phys.pilot_energy_joules > 0.0, "pilot_energy_joules must be positive");
    const double noise_psd = dbm_to_watts(phys.noise_psd_dbm_per_hz);
    return {phys.dl_power_watts / (phys.bandwidth_hz * noise_psd),
            phys.pilot_energy_joules / noise_psd};
}

/// Config with every user on the same energy budget and unit weights.
inline SystemConfig uniform_config(std::size_t n_antennas, std::size_t n_unicast,
                                   std::vector<std::size_t> group_sizes,
                                   std::size_t coherence_symbols, double total_dl_power,
                                   double energy_budget)
{
    SystemConfig config;
    config.n_antennas = n_antennas;
    config.n_unicast = n_unicast;
    config.n_groups = group_sizes.size();
    config.group_sizes = std::move(group_sizes);
    config.coherence_symbols = coherence_symbols;
    config.total_dl_power = total_dl_power;
    config.unicast_energy_budgets.assign(n_unicast, energy_budget);
    for (auto k : config.group_sizes) {
        config.multicast_energy_budgets.emplace_back(k, energy_budget);
    }
    return config;
}

} // namespace jumm
