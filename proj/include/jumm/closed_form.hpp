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
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "jumm/error.hpp"
#include "jumm/scenario.hpp"

/**
 * @file closed_form.hpp
 * MMSE estimation variances with co-pilot multicast training and the
 * achievable SINR / spectral efficiency of MRT precoding.
 *
 * Multicast users of one group share a single pilot. The BS estimates the
 * composite channel sum_t sqrt(tau q_t) g_t of the group; each member's
 * estimate is a scalar multiple of the composite estimate.
 */

namespace jumm {

/// Relative slack accepted on power and energy budgets before an allocation
/// counts as infeasible. Covers rounding in solver outputs only.
inline constexpr double kFeasibilityRelTol = 1e-9;

/// Full decision variable: downlink powers, pilot powers and pilot length.
struct PowerAllocation {
    std::vector<double> p_dl;              ///< unicast downlink power, per user
    std::vector<double> q_dl;              ///< multicast downlink power, per group
    std::vector<double> p_up;              ///< unicast pilot power, per user
    std::vector<std::vector<double>> q_up; ///< multicast pilot power, per group member
    std::size_t tau = 0;                   ///< pilot length in symbols

    double unicast_power() const { return std::accumulate(p_dl.begin(), p_dl.end(), 0.0); }
    double multicast_power() const { return std::accumulate(q_dl.begin(), q_dl.end(), 0.0); }
};

/// Per-antenna variances of the channel estimates.
struct EstimationStats {
    std::vector<double> vartheta;          ///< unicast estimate variance
    std::vector<std::vector<double>> xi;   ///< per-member multicast estimate variance
    std::vector<double> gamma;             ///< composite group estimate variance
};

struct LinkQuality {
    double sinr = 0.0;
    double se = 0.0; ///< bit/s/Hz including pilot overhead
};

struct SpectralEfficiencies {
    std::vector<double> se_unicast;
    std::vector<std::vector<double>> se_multicast;
    std::vector<double> sinr_unicast;
    std::vector<std::vector<double>> sinr_multicast;
};

/// vartheta = tau p beta^2 / (1 + tau p beta).
inline double estimation_variance_unicast(std::size_t tau, double p_up, double beta)
{
    detail::require(tau >= 1 && p_up >= 0.0 && beta > 0.0,
                    "estimation_variance_unicast: need tau >= 1, p_up >= 0, beta > 0");
    const double snr = static_cast<double>(tau) * p_up * beta;
    return beta * (snr / (1.0 + snr));
}

struct MulticastEstimation {
    std::vector<double> xi;
    double gamma = 0.0;
};

/// xi_k = tau q_k eta_k^2 / (1 + S), gamma = S^2 / (1 + S), S = sum_t tau q_t eta_t.
inline MulticastEstimation estimation_variance_multicast(std::size_t tau, std::span<const double> q_up,
                                                         std::span<const double> eta)
{
    detail::require(tau >= 1 && q_up.size() == eta.size() && !eta.empty(),
                    "estimation_variance_multicast: need tau >= 1 and matching nonempty inputs");
    const double t = static_cast<double>(tau);
    double received = 0.0;
    for (std::size_t k = 0; k < eta.size(); ++k) {
        detail::require(q_up[k] >= 0.0 && eta[k] > 0.0,
                        "estimation_variance_multicast: need q_up >= 0, eta > 0");
        received += t * q_up[k] * eta[k];
    }
    MulticastEstimation out;
    out.xi.reserve(eta.size());
    for (std::size_t k = 0; k < eta.size(); ++k) {
        out.xi.push_back(t * q_up[k] * eta[k] * eta[k] / (1.0 + received));
    }
    out.gamma = received * received / (1.0 + received);
    return out;
}

/// Scale c_k with g_hat_k = c_k g_hat_composite; zero when the group sends no pilot.
inline double copilot_scale(std::size_t tau, std::span<const double> q_up, std::span<const double> eta,
                            std::size_t k)
{
    const double t = static_cast<double>(tau);
    double received = 0.0;
    for (std::size_t i = 0; i < eta.size(); ++i) {
        received += t * q_up[i] * eta[i];
    }
    if (received == 0.0) {
        return 0.0;
    }
    return std::sqrt(t * q_up[k]) * eta[k] / received;
}

inline EstimationStats estimation_stats(const PowerAllocation& alloc, const LargeScaleProfile& profile)
{
    detail::require(alloc.p_up.size() == profile.beta.size(), "p_up size must match beta");
    detail::require(alloc.q_up.size() == profile.eta.size(), "q_up group count must match eta");
    EstimationStats stats;
    stats.vartheta.reserve(profile.beta.size());
    for (std::size_t m = 0; m < profile.beta.size(); ++m) {
        stats.vartheta.push_back(estimation_variance_unicast(alloc.tau, alloc.p_up[m], profile.beta[m]));
    }
    for (std::size_t g = 0; g < profile.eta.size(); ++g) {
        auto est = estimation_variance_multicast(alloc.tau, alloc.q_up[g], profile.eta[g]);
        stats.xi.push_back(std::move(est.xi));
        stats.gamma.push_back(est.gamma);
    }
    return stats;
}

/// Fraction of the coherence block left for data: 1 - tau/T.
inline double prelog(std::size_t tau, std::size_t coherence_symbols)
{
    return 1.0 - static_cast<double>(tau) / static_cast<double>(coherence_symbols);
}

/// Throws InfeasibleAllocation if `alloc` breaks a budget of `config`.
inline void check_feasible(const SystemConfig& config, const PowerAllocation& alloc)
{
    detail::require(alloc.p_dl.size() == config.n_unicast && alloc.p_up.size() == config.n_unicast,
                    "allocation unicast sizes must match n_unicast");
    detail::require(alloc.q_dl.size() == config.n_groups && alloc.q_up.size() == config.n_groups,
                    "allocation multicast sizes must match n_groups");
    for (std::size_t g = 0; g < config.n_groups; ++g) {
        detail::require(alloc.q_up[g].size() == config.group_sizes[g],
                        "allocation q_up group size mismatch");
    }
    auto nonneg = [](const std::vector<double>& v) {
        for (double x : v) {
            if (!(x >= 0.0) || !std::isfinite(x)) {
                return false;
            }
        }
        return true;
    };
    if (!nonneg(alloc.p_dl) || !nonneg(alloc.q_dl) || !nonneg(alloc.p_up)) {
        throw InfeasibleAllocation("powers must be finite and nonnegative");
    }
    for (const auto& q : alloc.q_up) {
        if (!nonneg(q)) {
            throw InfeasibleAllocation("pilot powers must be finite and nonnegative");
        }
    }
    if (alloc.tau < config.min_pilot_length() || alloc.tau > config.coherence_symbols) {
        throw InfeasibleAllocation("pilot length tau=" + std::to_string(alloc.tau) +
                                   " outside [U+G, T]");
    }
    const double total = alloc.unicast_power() + alloc.multicast_power();
    const double budget = config.total_dl_power;
    if (total > budget * (1.0 + kFeasibilityRelTol)) {
        throw InfeasibleAllocation("total downlink power P_un + P_mu = " + std::to_string(total) +
                                   " exceeds P = " + std::to_string(budget) +
                                   " (constraint P_un + P_mu <= P)");
    }
    const double t = static_cast<double>(alloc.tau);
    for (std::size_t m = 0; m < config.n_unicast; ++m) {
        const double e = config.unicast_energy_budgets[m];
        if (t * alloc.p_up[m] > e * (1.0 + kFeasibilityRelTol)) {
            throw InfeasibleAllocation("unicast user " + std::to_string(m) +
                                       " pilot energy tau*p_up exceeds its budget");
        }
    }
    for (std::size_t g = 0; g < config.n_groups; ++g) {
        for (std::size_t k = 0; k < config.group_sizes[g]; ++k) {
            const double e = config.multicast_energy_budgets[g][k];
            if (t * alloc.q_up[g][k] > e * (1.0 + kFeasibilityRelTol)) {
                throw InfeasibleAllocation("multicast user (" + std::to_string(g) + "," +
                                           std::to_string(k) + ") pilot energy tau*q_up exceeds its budget");
            }
        }
    }
}

/// SINR_m = N p_m vartheta_m / (1 + beta_m (P_un + P_mu)), with the matching SE.
inline std::vector<LinkQuality> sinr_se_unicast(const SystemConfig& config, const EstimationStats& stats,
                                                const PowerAllocation& alloc,
                                                const LargeScaleProfile& profile)
{
    check_feasible(config, alloc);
    detail::require(stats.vartheta.size() == config.n_unicast, "stats.vartheta size mismatch");
    const double n = static_cast<double>(config.n_antennas);
    const double total = alloc.unicast_power() + alloc.multicast_power();
    const double factor = prelog(alloc.tau, config.coherence_symbols);
    std::vector<LinkQuality> out(config.n_unicast);
    for (std::size_t m = 0; m < config.n_unicast; ++m) {
        out[m].sinr = n * alloc.p_dl[m] * stats.vartheta[m] / (1.0 + profile.beta[m] * total);
        out[m].se = factor * std::log2(1.0 + out[m].sinr);
    }
    return out;
}

/// SINR_jk = N q_j xi_jk / (1 + eta_jk (P_mu + P_un)), with the matching SE.
inline std::vector<std::vector<LinkQuality>> sinr_se_multicast(const SystemConfig& config,
                                                               const EstimationStats& stats,
                                                               const PowerAllocation& alloc,
                                                               const LargeScaleProfile& profile)
{
    check_feasible(config, alloc);
    detail::require(stats.xi.size() == config.n_groups, "stats.xi size mismatch");
    const double n = static_cast<double>(config.n_antennas);
    const double total = alloc.unicast_power() + alloc.multicast_power();
    const double factor = prelog(alloc.tau, config.coherence_symbols);
    std::vector<std::vector<LinkQuality>> out(config.n_groups);
    for (std::size_t g = 0; g < config.n_groups; ++g) {
        out[g].resize(config.group_sizes[g]);
        for (std::size_t k = 0; k < config.group_sizes[g]; ++k) {
            auto& link = out[g][k];
            link.sinr = n * alloc.q_dl[g] * stats.xi[g][k] / (1.0 + profile.eta[g][k] * total);
            link.se = factor * std::log2(1.0 + link.sinr);
        }
    }
    return out;
}

inline SpectralEfficiencies spectral_efficiencies(const SystemConfig& config, const PowerAllocation& alloc,
                                                  const LargeScaleProfile& profile)
{
    const auto stats = estimation_stats(alloc, profile);
    SpectralEfficiencies out;
    for (const auto& link : sinr_se_unicast(config, stats, alloc, profile)) {
        out.sinr_unicast.push_back(link.sinr);
        out.se_unicast.push_back(link.se);
    }
    for (const auto& group : sinr_se_multicast(config, stats, alloc, profile)) {
        auto& sinr = out.sinr_multicast.emplace_back();
        auto& se = out.se_multicast.emplace_back();
        for (const auto& link : group) {
            sinr.push_back(link.sinr);
            se.push_back(link.se);
        }
    }
    return out;
}

} // namespace jumm
