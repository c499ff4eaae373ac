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
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "jumm/closed_form.hpp"
#include "jumm/error.hpp"
#include "jumm/parallel.hpp"
#include "jumm/scenario.hpp"

/**
 * @file optimizers.hpp
 * Optimal power control for the two services sharing the downlink budget.
 *
 *  - solve_mmf: max-min multicast SE for a fixed unicast power. Every
 *    multicast user ends up at the same SINR; the weakest member of each group
 *    pins the group's pilot energy.
 *  - solve_wsse: weighted unicast sum SE for a fixed multicast power via
 *    water-filling over the unicast users.
 *  - pareto_sweep: evaluates both optima along P_un + P_mu = P, which traces
 *    the Pareto boundary of the two objectives.
 *  - check_convexity: numerical check that the traced boundary encloses a
 *    convex region.
 */

namespace jumm {

struct MmfSolution {
    double objective = 0.0;   ///< common multicast SE, bit/s/Hz
    double common_sinr = 0.0; ///< SINR shared by every multicast user
    double p_mu = 0.0;        ///< multicast downlink power spent
    std::vector<double> q_dl;
    std::vector<std::vector<double>> q_up;
    std::size_t tau = 0;
    std::vector<double> upsilon;             ///< per-group bottleneck of E eta^2 / (1 + eta P)
    std::vector<std::vector<double>> x_star; ///< pilot energy tau * q_up
};

struct WsseSolution {
    double objective = 0.0; ///< weighted unicast sum SE, bit/s/Hz
    double p_un = 0.0;      ///< unicast downlink power spent
    std::vector<double> p_dl;
    std::vector<double> p_up;
    std::size_t tau = 0;
    std::optional<double> water_level_nu; ///< empty when no power is left for unicast
    std::vector<double> vartheta_star;
    std::size_t iterations = 0;
};

struct ParetoPoint {
    double p_un = 0.0;
    double p_mu = 0.0;
    double o_mu = 0.0;
    double o_un = 0.0;
    MmfSolution mmf;
    WsseSolution wsse;
};

struct WaterFillingOptions {
    std::size_t max_iterations = 200;
    double rel_tol = 1e-12; ///< on the power-sum residual
};

namespace detail {

inline void require_instance(const SystemConfig& config, const LargeScaleProfile& profile)
{
    config.validate();
    profile.validate(config);
}

} // namespace detail

/// Max-min fair multicast allocation when the unicast service holds `p_un`.
inline MmfSolution solve_mmf(const SystemConfig& config, const LargeScaleProfile& profile, double p_un)
{
    detail::require_instance(config, profile);
    const double total = config.total_dl_power;
    detail::require(p_un >= 0.0 && p_un <= total, "solve_mmf: p_un outside [0, P]");

    const double n = static_cast<double>(config.n_antennas);
    MmfSolution sol;
    sol.tau = config.min_pilot_length();
    sol.p_mu = total - p_un;
    const double tau = static_cast<double>(sol.tau);

    double inverse_sum = 0.0;
    double members = 0.0;
    for (std::size_t g = 0; g < config.n_groups; ++g) {
        const auto& eta = profile.eta[g];
        const auto& energy = config.multicast_energy_budgets[g];
        double upsilon = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < eta.size(); ++k) {
            upsilon = std::min(upsilon, energy[k] * eta[k] * eta[k] / (1.0 + eta[k] * total));
        }
        sol.upsilon.push_back(upsilon);
        inverse_sum += 1.0 / upsilon;
        auto& x = sol.x_star.emplace_back();
        auto& q = sol.q_up.emplace_back();
        for (std::size_t k = 0; k < eta.size(); ++k) {
            x.push_back((1.0 + eta[k] * total) / (eta[k] * eta[k]) * upsilon);
            q.push_back(x.back() / tau);
            inverse_sum += 1.0 / eta[k];
        }
        members += static_cast<double>(eta.size());
    }

    sol.common_sinr = n * sol.p_mu / (total * members + inverse_sum);
    for (std::size_t g = 0; g < config.n_groups; ++g) {
        double received = 0.0;
        for (std::size_t k = 0; k < profile.eta[g].size(); ++k) {
            received += sol.x_star[g][k] * profile.eta[g][k];
        }
        sol.q_dl.push_back(sol.common_sinr / (n * sol.upsilon[g]) * (1.0 + received));
    }
    sol.objective = prelog(sol.tau, config.coherence_symbols) * std::log2(1.0 + sol.common_sinr);
    return sol;
}

/// Weighted sum-SE unicast allocation when the multicast service holds `p_mu`.
///
/// p_m = max(0, alpha_m / (nu ln 2) - (1 + beta_m P) / (N vartheta_m)), with
/// the water level nu found by bisection so the powers sum to P - p_mu. Once
/// the bisection has settled the active set, nu is recomputed in closed form
/// from that set.
inline WsseSolution solve_wsse(const SystemConfig& config, const LargeScaleProfile& profile, double p_mu,
                               const WaterFillingOptions& options = {})
{
    detail::require_instance(config, profile);
    const double total = config.total_dl_power;
    detail::require(p_mu >= 0.0 && p_mu <= total, "solve_wsse: p_mu outside [0, P]");

    const std::size_t users = config.n_unicast;
    const double n = static_cast<double>(config.n_antennas);
    WsseSolution sol;
    sol.tau = config.min_pilot_length();
    const double tau = static_cast<double>(sol.tau);
    std::vector<double> floor(users);
    std::vector<double> weight(users);
    for (std::size_t m = 0; m < users; ++m) {
        const double e = config.unicast_energy_budgets[m];
        const double beta = profile.beta[m];
        sol.p_up.push_back(e / tau);
        sol.vartheta_star.push_back(e * beta * beta / (1.0 + e * beta));
        floor[m] = (1.0 + beta * total) / (n * sol.vartheta_star[m]);
        weight[m] = config.weight(m);
    }
    sol.p_dl.assign(users, 0.0);

    const double budget = total - p_mu;
    if (budget <= 0.0) {
        return sol;
    }

    constexpr double ln2 = std::numbers::ln2;
    // The search runs on level = 1 / (nu ln 2).
    auto power_sum = [&](double level) {
        double sum = 0.0;
        for (std::size_t m = 0; m < users; ++m) {
            sum += std::max(0.0, weight[m] * level - floor[m]);
        }
        return sum;
    };

    // Bracket: at `low` the first user is just switching on (sum = 0); at
    // `high` the cheapest user alone would absorb the whole budget.
    double low = std::numeric_limits<double>::infinity();
    double high = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < users; ++m) {
        low = std::min(low, floor[m] / weight[m]);
        high = std::min(high, (floor[m] + budget) / weight[m]);
    }
    for (int guard = 0; power_sum(low) > budget && guard < 64; ++guard) {
        low *= 0.5;
    }
    for (int guard = 0; power_sum(high) < budget && guard < 64; ++guard) {
        high *= 2.0;
    }

    double level = high;
    bool converged = false;
    for (sol.iterations = 0; sol.iterations < options.max_iterations; ++sol.iterations) {
        const double mid = 0.5 * (low + high);
        if (mid <= low || mid >= high) {
            break;
        }
        level = mid;
        const double sum = power_sum(level);
        if (std::abs(sum - budget) <= options.rel_tol * budget) {
            converged = true;
            break;
        }
        if (sum > budget) {
            high = level;
        } else {
            low = level;
        }
    }

    // Exact level for the active set found above.
    double active_floor = 0.0;
    double active_weight = 0.0;
    for (std::size_t m = 0; m < users; ++m) {
        if (weight[m] * level > floor[m]) {
            active_floor += floor[m];
            active_weight += weight[m];
        }
    }
    if (active_weight > 0.0) {
        const double exact = (budget + active_floor) / active_weight;
        bool consistent = true;
        for (std::size_t m = 0; m < users; ++m) {
            const bool was_active = weight[m] * level > floor[m];
            const bool is_active = weight[m] * exact > floor[m];
            consistent = consistent && (was_active == is_active);
        }
        if (consistent) {
            level = exact;
            converged = true;
        }
    }
    const double sum = power_sum(level);
    if (!converged || std::abs(sum - budget) > 1e-10 * budget) {
        throw NumericalError("solve_wsse: water-filling bisection did not converge after " +
                             std::to_string(sol.iterations) + " iterations");
    }

    sol.water_level_nu = 1.0 / (level * ln2);
    const double factor = prelog(sol.tau, config.coherence_symbols);
    for (std::size_t m = 0; m < users; ++m) {
        sol.p_dl[m] = std::max(0.0, weight[m] * level - floor[m]);
        sol.p_un += sol.p_dl[m];
        const double sinr = n * sol.p_dl[m] * sol.vartheta_star[m] / (1.0 + profile.beta[m] * total);
        sol.objective += weight[m] * std::log2(1.0 + sinr);
    }
    sol.objective *= factor;
    return sol;
}

/// Joint allocation realizing one boundary point.
inline PowerAllocation combine(const MmfSolution& mmf, const WsseSolution& wsse)
{
    PowerAllocation alloc;
    alloc.p_dl = wsse.p_dl;
    alloc.p_up = wsse.p_up;
    alloc.q_dl = mmf.q_dl;
    alloc.q_up = mmf.q_up;
    alloc.tau = mmf.tau;
    return alloc;
}

namespace detail {

/// Rounds `p_un` to a multiple of ulp(total), which makes total - p_un exact.
inline double snap_to_total(double total, double p_un)
{
    if (total <= 0.0 || p_un <= 0.0) {
        return 0.0;
    }
    if (p_un >= total) {
        return total;
    }
    const double ulp = std::nextafter(total, std::numeric_limits<double>::infinity()) - total;
    return std::min(total, std::nearbyint(p_un / ulp) * ulp);
}

} // namespace detail

/// Boundary point at a given unicast power; the multicast side gets the rest.
/// `p_un` is rounded to within half an ulp of P so that p_un + p_mu == P
/// holds exactly.
inline ParetoPoint pareto_point(const SystemConfig& config, const LargeScaleProfile& profile, double p_un)
{
    detail::require(p_un >= 0.0 && p_un <= config.total_dl_power, "pareto_point: p_un outside [0, P]");
    ParetoPoint point;
    point.p_un = detail::snap_to_total(config.total_dl_power, p_un);
    point.p_mu = config.total_dl_power - point.p_un;
    point.mmf = solve_mmf(config, profile, point.p_un);
    point.wsse = solve_wsse(config, profile, point.p_mu);
    point.o_mu = point.mmf.objective;
    point.o_un = point.wsse.objective;
    return point;
}

/// Sweeps P_un / P over {0, 1/(n-1), ..., 1}. Results do not depend on `threads`.
inline std::vector<ParetoPoint> pareto_sweep(const SystemConfig& config, const LargeScaleProfile& profile,
                                             std::size_t n_points = 21, std::size_t threads = 1)
{
    detail::require(n_points >= 2, "pareto_sweep: n_points must be at least 2");
    detail::require_instance(config, profile);
    const double total = config.total_dl_power;
    std::vector<ParetoPoint> points(n_points);
    parallel_for(n_points, threads, [&](std::size_t i) {
        const double p_un = i + 1 == n_points
                                ? total
                                : total * static_cast<double>(i) / static_cast<double>(n_points - 1);
        points[i] = pareto_point(config, profile, std::min(p_un, total));
    });
    return points;
}

struct ConvexityReport {
    bool is_consistent = true;
    double max_violation = 0.0;           ///< max of the two below
    double max_slope_violation = 0.0;     ///< interior point below its neighbours' chord
    double max_dominance_violation = 0.0; ///< pair midpoint above the interpolated boundary
    double tolerance = 0.0;
    double scale = 1.0; ///< violations are divided by this
};

/// Checks that the swept boundary bounds a convex region.
///
/// Viewing o_un as a function of o_mu, the region below the curve is convex
/// iff the curve is concave. Two checks, both reported relative to
/// max(1, largest objective):
///  - every interior point lies on or above the chord through its neighbours;
///  - for every pair of points the midpoint of their objective tuples lies on
///    or below the piecewise-linear boundary.
inline ConvexityReport check_convexity(const std::vector<ParetoPoint>& points, double tolerance = 1e-9)
{
    detail::require(points.size() >= 3, "check_convexity: need at least 3 points");
    for (std::size_t i = 1; i < points.size(); ++i) {
        detail::require(points[i - 1].p_un < points[i].p_un,
                        "check_convexity: points must be sorted by strictly increasing p_un");
    }

    // Sweep order has o_mu falling; reverse it so x = o_mu rises.
    std::vector<double> x;
    std::vector<double> y;
    for (auto it = points.rbegin(); it != points.rend(); ++it) {
        x.push_back(it->o_mu);
        y.push_back(it->o_un);
    }
    ConvexityReport report;
    report.tolerance = tolerance;
    for (std::size_t i = 0; i < x.size(); ++i) {
        report.scale = std::max({report.scale, std::abs(x[i]), std::abs(y[i])});
    }

    double slope = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        // A boundary that doubles back in o_mu is not a function of o_mu.
        slope = std::max(slope, x[i - 1] - x[i]);
    }
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        const double width = x[i + 1] - x[i - 1];
        if (width <= 0.0) {
            continue;
        }
        const double chord = y[i - 1] + (y[i + 1] - y[i - 1]) * ((x[i] - x[i - 1]) / width);
        slope = std::max(slope, chord - y[i]);
    }

    auto boundary_at = [&](double at) {
        if (at <= x.front()) {
            return y.front();
        }
        if (at >= x.back()) {
            return y.back();
        }
        const auto hi = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), at) - x.begin());
        const std::size_t lo = hi - 1;
        const double width = x[hi] - x[lo];
        if (width <= 0.0) {
            return std::max(y[lo], y[hi]);
        }
        return y[lo] + (y[hi] - y[lo]) * ((at - x[lo]) / width);
    };
    double dominance = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            const double mid_x = 0.5 * (x[i] + x[j]);
            const double mid_y = 0.5 * (y[i] + y[j]);
            dominance = std::max(dominance, mid_y - boundary_at(mid_x));
        }
    }

    report.max_slope_violation = slope / report.scale;
    report.max_dominance_violation = dominance / report.scale;
    report.max_violation = std::max(report.max_slope_violation, report.max_dominance_violation);
    report.is_consistent = report.max_violation <= tolerance;
    return report;
}

} // namespace jumm
