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
#include <limits>
#include <string_view>
#include <vector>

#include "jumm/closed_form.hpp"
#include "jumm/error.hpp"
#include "jumm/scenario.hpp"

/**
 * @file oracle.hpp
 * Exhaustive grid search over the raw decision variables of one service,
 * used to validate the closed-form optima on tiny instances.
 *
 * The grid covers:
 *  - downlink powers: every point of {i * B / steps : sum i <= steps}, with B
 *    the power left by the other service (slack included);
 *  - pilot energies tau * q_up per user: `pilot_levels` evenly spaced values
 *    on [0, E], both box bounds included, plus the geometric ladder
 *    E * 2^(-j / pilot_steps_per_octave) for j down to `pilot_octaves` octaves;
 *  - pilot length tau in {U+G, ..., min(T, U+G+4)}.
 *
 * Downlink SINRs depend on the pilot only through the energy tau * q_up, so
 * every energy on the grid is feasible for every tau and the search over
 * (powers, energies) is shared by all tau; tau then only scales the SE by
 * its prelog. Pilot candidates whose estimate variances are dominated by
 * another candidate's (no larger for every member, of the same group) can
 * never win and are dropped before the power search. Candidates are scored
 * with the same SINR expressions as closed_form, and the winner is re-scored
 * through closed_form itself.
 */

namespace jumm {

enum class OracleObjective { mmf, wsse };

inline std::string_view to_string(OracleObjective o)
{
    return o == OracleObjective::mmf ? "mmf" : "wsse";
}

struct OracleOptions {
    std::size_t grid_steps = 1000;
    std::size_t pilot_levels = 11;
    std::size_t pilot_octaves = 60;
    std::size_t pilot_steps_per_octave = 16;
};

struct OracleResult {
    double objective = 0.0; ///< best objective, re-scored via closed_form
    double search_objective = 0.0; ///< same value as seen by the grid search
    PowerAllocation allocation; ///< other service's side carries only its total power
    double step = 0.0; ///< downlink grid step B / steps
};

inline constexpr std::size_t kOracleMaxUnicast = 3;
inline constexpr std::size_t kOracleMaxGroups = 2;
inline constexpr std::size_t kOracleMaxGroupSize = 2;
inline constexpr std::size_t kOracleMaxSteps = 1000;

namespace detail {

inline void require_oracle_instance(const SystemConfig& config, const LargeScaleProfile& profile,
                                    double other_power, const OracleOptions& options)
{
    config.validate();
    profile.validate(config);
    bool small = config.n_unicast <= kOracleMaxUnicast && config.n_groups <= kOracleMaxGroups;
    for (auto k : config.group_sizes) {
        small = small && k <= kOracleMaxGroupSize;
    }
    require(small, "brute_force_oracle: instance too large (need U <= 3, G <= 2, K_g <= 2)");
    require(options.grid_steps >= 1 && options.grid_steps <= kOracleMaxSteps,
            "brute_force_oracle: grid_steps must lie in [1, 1000]");
    require(options.pilot_levels >= 2 && options.pilot_levels <= 101,
            "brute_force_oracle: pilot_levels must lie in [2, 101]");
    require(options.pilot_octaves <= 64 && options.pilot_steps_per_octave <= 64,
            "brute_force_oracle: pilot_octaves and pilot_steps_per_octave must be at most 64");
    require(other_power >= 0.0 && other_power <= config.total_dl_power,
            "brute_force_oracle: other service power outside [0, P]");
}

inline std::vector<std::size_t> oracle_pilot_lengths(const SystemConfig& config)
{
    std::vector<std::size_t> taus;
    const auto first = config.min_pilot_length();
    const auto last = std::min(config.coherence_symbols, first + 4);
    for (auto t = first; t <= last; ++t) {
        taus.push_back(t);
    }
    return taus;
}

inline std::vector<double> energy_grid(double budget, const OracleOptions& options)
{
    const std::size_t levels = options.pilot_levels;
    std::vector<double> grid(levels);
    for (std::size_t l = 0; l < levels; ++l) {
        grid[l] = l + 1 == levels ? budget : budget * static_cast<double>(l) / static_cast<double>(levels - 1);
    }
    const std::size_t rungs = options.pilot_octaves * options.pilot_steps_per_octave;
    for (std::size_t j = 1; j <= rungs; ++j) {
        grid.push_back(budget * std::exp2(-static_cast<double>(j) / static_cast<double>(options.pilot_steps_per_octave)));
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

/// Indices of the candidates not dominated by another (for K <= 2 members).
inline std::vector<std::size_t> undominated(const std::vector<std::vector<double>>& xi)
{
    std::vector<std::size_t> order(xi.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    const bool pair = !xi.empty() && xi.front().size() == 2;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (xi[a][0] != xi[b][0]) {
            return xi[a][0] > xi[b][0];
        }
        return pair && xi[a][1] > xi[b][1];
    });
    if (!pair) {
        return {order.front()};
    }
    std::vector<std::size_t> front;
    double best = -1.0;
    for (auto i : order) {
        if (xi[i][1] > best) {
            front.push_back(i);
            best = xi[i][1];
        }
    }
    return front;
}

/// Every tuple of per-member energies from the per-member grids.
inline std::vector<std::vector<double>> energy_tuples(const std::vector<std::vector<double>>& grids)
{
    std::vector<std::vector<double>> tuples{{}};
    for (const auto& grid : grids) {
        std::vector<std::vector<double>> next;
        next.reserve(tuples.size() * grid.size());
        for (const auto& prefix : tuples) {
            for (double e : grid) {
                auto t = prefix;
                t.push_back(e);
                next.push_back(std::move(t));
            }
        }
        tuples = std::move(next);
    }
    return tuples;
}

/// Max-min multicast search. candidates[g] lists pilot-energy tuples for group g.
inline OracleResult mmf_search(const SystemConfig& config, const LargeScaleProfile& profile, double p_un,
                               std::size_t steps,
                               const std::vector<std::vector<std::vector<double>>>& candidates,
                               const std::vector<std::size_t>& taus)
{
    const std::size_t groups = config.n_groups;
    const double n = static_cast<double>(config.n_antennas);
    const double budget = config.total_dl_power - p_un;
    const double step = budget / static_cast<double>(steps);

    // xi for every candidate; tau = 1 makes q_up the energy itself.
    std::vector<std::vector<std::vector<double>>> xi(groups);
    std::vector<std::vector<std::size_t>> kept(groups);
    for (std::size_t g = 0; g < groups; ++g) {
        std::vector<std::vector<double>> all;
        all.reserve(candidates[g].size());
        for (const auto& energies : candidates[g]) {
            all.push_back(estimation_variance_multicast(1, energies, profile.eta[g]).xi);
        }
        kept[g] = undominated(all);
        for (auto c : kept[g]) {
            xi[g].push_back(std::move(all[c]));
        }
    }

    // gain[g][s]: best over candidates of min_k N xi_gk / (1 + eta_gk * total),
    // where total = p_un + s * step is the downlink power in use.
    std::vector<std::vector<double>> gain(groups, std::vector<double>(steps + 1, 0.0));
    std::vector<std::vector<std::size_t>> pick(groups, std::vector<std::size_t>(steps + 1, 0));
    for (std::size_t s = 0; s <= steps; ++s) {
        const double in_use = p_un + static_cast<double>(s) * step;
        for (std::size_t g = 0; g < groups; ++g) {
            const auto& eta = profile.eta[g];
            for (std::size_t c = 0; c < xi[g].size(); ++c) {
                double worst = std::numeric_limits<double>::infinity();
                for (std::size_t k = 0; k < eta.size(); ++k) {
                    worst = std::min(worst, n * xi[g][c][k] / (1.0 + eta[k] * in_use));
                }
                if (worst > gain[g][s]) {
                    gain[g][s] = worst;
                    pick[g][s] = kept[g][c];
                }
            }
        }
    }

    double best = -1.0;
    std::size_t best_s = 0;
    std::size_t best_i = 0;
    for (std::size_t s = 0; s <= steps; ++s) {
        if (groups == 1) {
            const double v = static_cast<double>(s) * step * gain[0][s];
            if (v > best) {
                best = v;
                best_s = s;
                best_i = s;
            }
            continue;
        }
        for (std::size_t i = 0; i <= s; ++i) {
            const double v = std::min(static_cast<double>(i) * step * gain[0][s],
                                      static_cast<double>(s - i) * step * gain[1][s]);
            if (v > best) {
                best = v;
                best_s = s;
                best_i = i;
            }
        }
    }

    OracleResult result;
    result.step = step;
    result.search_objective = -1.0;
    std::size_t best_tau = taus.front();
    for (auto t : taus) {
        const double v = prelog(t, config.coherence_symbols) * std::log2(1.0 + best);
        if (v > result.search_objective) {
            result.search_objective = v;
            best_tau = t;
        }
    }

    auto& alloc = result.allocation;
    alloc.tau = best_tau;
    alloc.q_dl.resize(groups);
    alloc.q_dl[0] = static_cast<double>(best_i) * step;
    if (groups == 2) {
        alloc.q_dl[1] = static_cast<double>(best_s - best_i) * step;
    }
    for (std::size_t g = 0; g < groups; ++g) {
        auto& q = alloc.q_up.emplace_back();
        for (double e : candidates[g][pick[g][best_s]]) {
            q.push_back(e / static_cast<double>(best_tau));
        }
    }
    alloc.p_dl.assign(config.n_unicast, p_un / static_cast<double>(config.n_unicast));
    alloc.p_up.assign(config.n_unicast, 0.0);

    const auto links = sinr_se_multicast(config, estimation_stats(alloc, profile), alloc, profile);
    result.objective = std::numeric_limits<double>::infinity();
    for (const auto& group : links) {
        for (const auto& link : group) {
            result.objective = std::min(result.objective, link.se);
        }
    }
    return result;
}

inline OracleResult wsse_search(const SystemConfig& config, const LargeScaleProfile& profile, double p_mu,
                                const OracleOptions& options)
{
    const std::size_t users = config.n_unicast;
    const std::size_t steps = options.grid_steps;
    const double n = static_cast<double>(config.n_antennas);
    const double budget = config.total_dl_power - p_mu;
    const double step = budget / static_cast<double>(steps);

    std::vector<std::vector<double>> vartheta(users);
    std::vector<std::vector<double>> energies(users);
    for (std::size_t m = 0; m < users; ++m) {
        const auto grid = energy_grid(config.unicast_energy_budgets[m], options);
        std::vector<std::vector<double>> all;
        for (double e : grid) {
            all.push_back({estimation_variance_unicast(1, e, profile.beta[m])});
        }
        for (auto c : undominated(all)) {
            energies[m].push_back(grid[c]);
            vartheta[m].push_back(all[c][0]);
        }
    }

    // table[m][s(s+1)/2 + i]: best over pilot energies of alpha_m log2(1 + SINR_m)
    // with user m at power i * step and s * step of unicast power in use.
    auto tri = [](std::size_t s, std::size_t i) { return s * (s + 1) / 2 + i; };
    const std::size_t cells = tri(steps, steps) + 1;
    std::vector<std::vector<double>> table(users, std::vector<double>(cells, 0.0));
    for (std::size_t m = 0; m < users; ++m) {
        const double alpha = config.weight(m);
        for (std::size_t s = 0; s <= steps; ++s) {
            const double denom = 1.0 + profile.beta[m] * (p_mu + static_cast<double>(s) * step);
            for (std::size_t i = 0; i <= s; ++i) {
                double v = 0.0;
                for (double th : vartheta[m]) {
                    v = std::max(v, alpha * std::log2(1.0 + n * static_cast<double>(i) * step * th / denom));
                }
                table[m][tri(s, i)] = v;
            }
        }
    }

    double best = -1.0;
    std::size_t best_s = 0;
    std::vector<std::size_t> best_split(users, 0);
    for (std::size_t s = 0; s <= steps; ++s) {
        const std::size_t row = tri(s, 0);
        if (users == 1) {
            const double v = table[0][row + s];
            if (v > best) {
                best = v;
                best_s = s;
                best_split = {s};
            }
        } else if (users == 2) {
            for (std::size_t i = 0; i <= s; ++i) {
                const double v = table[0][row + i] + table[1][row + s - i];
                if (v > best) {
                    best = v;
                    best_s = s;
                    best_split = {i, s - i};
                }
            }
        } else {
            const double* t0 = table[0].data() + row;
            const double* t1 = table[1].data() + row;
            const double* t2 = table[2].data() + row;
            for (std::size_t i = 0; i <= s; ++i) {
                for (std::size_t j = 0; i + j <= s; ++j) {
                    const double v = t0[i] + t1[j] + t2[s - i - j];
                    if (v > best) {
                        best = v;
                        best_s = s;
                        best_split = {i, j, s - i - j};
                    }
                }
            }
        }
    }

    OracleResult result;
    result.step = step;
    result.search_objective = -1.0;
    std::size_t best_tau = config.min_pilot_length();
    for (auto t : oracle_pilot_lengths(config)) {
        const double v = prelog(t, config.coherence_symbols) * best;
        if (v > result.search_objective) {
            result.search_objective = v;
            best_tau = t;
        }
    }

    auto& alloc = result.allocation;
    alloc.tau = best_tau;
    const double in_use = p_mu + static_cast<double>(best_s) * step;
    for (std::size_t m = 0; m < users; ++m) {
        const double p = static_cast<double>(best_split[m]) * step;
        alloc.p_dl.push_back(p);
        // Recover the winning pilot energy for this user.
        const double denom = 1.0 + profile.beta[m] * in_use;
        std::size_t level = 0;
        double v_best = -1.0;
        for (std::size_t l = 0; l < vartheta[m].size(); ++l) {
            const double v = std::log2(1.0 + n * p * vartheta[m][l] / denom);
            if (v > v_best) {
                v_best = v;
                level = l;
            }
        }
        alloc.p_up.push_back(energies[m][level] / static_cast<double>(best_tau));
    }
    alloc.q_dl.assign(config.n_groups, p_mu / static_cast<double>(config.n_groups));
    for (auto k : config.group_sizes) {
        alloc.q_up.emplace_back(k, 0.0);
    }

    const auto links = sinr_se_unicast(config, estimation_stats(alloc, profile), alloc, profile);
    result.objective = 0.0;
    for (std::size_t m = 0; m < users; ++m) {
        result.objective += config.weight(m) * links[m].se;
    }
    return result;
}

} // namespace detail

/// Grid-search optimum of one service's objective.
///
/// `other_power` is the downlink power held by the other service: P_un for
/// OracleObjective::mmf, P_mu for OracleObjective::wsse. Limited to U <= 3,
/// G <= 2, K_g <= 2 and grid_steps <= 1000.
inline OracleResult brute_force_oracle(const SystemConfig& config, const LargeScaleProfile& profile,
                                       OracleObjective objective, double other_power,
                                       const OracleOptions& options = {})
{
    detail::require_oracle_instance(config, profile, other_power, options);
    if (objective == OracleObjective::wsse) {
        return detail::wsse_search(config, profile, other_power, options);
    }
    std::vector<std::vector<std::vector<double>>> candidates;
    for (std::size_t g = 0; g < config.n_groups; ++g) {
        std::vector<std::vector<double>> grids;
        for (double e : config.multicast_energy_budgets[g]) {
            grids.push_back(detail::energy_grid(e, options));
        }
        candidates.push_back(detail::energy_tuples(grids));
    }
    return detail::mmf_search(config, profile, other_power, options.grid_steps, candidates,
                              detail::oracle_pilot_lengths(config));
}

/// Grid search over multicast downlink powers only, with pilots held at `q_up`
/// and pilot length `tau`.
inline OracleResult grid_search_multicast_downlink(const SystemConfig& config, const LargeScaleProfile& profile,
                                                   double p_un, const std::vector<std::vector<double>>& q_up,
                                                   std::size_t tau, std::size_t grid_steps = 1000)
{
    detail::require_oracle_instance(config, profile, p_un, OracleOptions{grid_steps, 2});
    detail::require(q_up.size() == config.n_groups, "q_up must have n_groups entries");
    std::vector<std::vector<std::vector<double>>> candidates;
    for (std::size_t g = 0; g < config.n_groups; ++g) {
        detail::require(q_up[g].size() == config.group_sizes[g], "q_up group size mismatch");
        std::vector<double> energies;
        for (double q : q_up[g]) {
            energies.push_back(q * static_cast<double>(tau));
        }
        candidates.push_back({energies});
    }
    return detail::mmf_search(config, profile, p_un, grid_steps, candidates, {tau});
}

} // namespace jumm
