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
#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "jumm/closed_form.hpp"
#include "jumm/error.hpp"
#include "jumm/parallel.hpp"
#include "jumm/rng.hpp"
#include "jumm/scenario.hpp"

/**
 * @file montecarlo.hpp
 * Link-level simulation of one coherence block: Rayleigh channels, uplink
 * pilot training with MMSE estimation, MRT precoding and the per-term
 * decomposition of the received downlink signal used by the
 * use-and-then-forget SINR bound.
 *
 * Realization r draws from substream(seed, r). Sample moments are gathered in
 * fixed blocks of realizations and the blocks are merged in index order, so a
 * report is bit-identical for any worker count.
 */

namespace jumm {

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

struct ChannelRealization {
    std::vector<CVector> f;              ///< unicast channels
    std::vector<std::vector<CVector>> g; ///< multicast channels per group
};

struct ChannelEstimates {
    std::vector<CVector> f_hat;
    std::vector<CVector> g_hat_composite;
    std::vector<std::vector<CVector>> g_hat_user;
};

struct Precoders {
    CMatrix v; ///< N x U, unicast
    CMatrix w; ///< N x G, multicast
};

namespace detail {

inline CVector gaussian_vector(Rng& rng, std::size_t n, double variance)
{
    std::normal_distribution<double> normal;
    const double scale = std::sqrt(variance / 2.0);
    CVector out(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        out[i] = {scale * re, scale * im};
    }
    return out;
}

} // namespace detail

/// i.i.d. CN(0, beta) / CN(0, eta) channel vectors with `config.n_antennas` entries.
inline ChannelRealization draw_channels(const LargeScaleProfile& profile, const SystemConfig& config, Rng& rng)
{
    ChannelRealization out;
    for (double beta : profile.beta) {
        out.f.push_back(detail::gaussian_vector(rng, config.n_antennas, beta));
    }
    for (const auto& group : profile.eta) {
        auto& g = out.g.emplace_back();
        for (double eta : group) {
            g.push_back(detail::gaussian_vector(rng, config.n_antennas, eta));
        }
    }
    return out;
}

/// MMSE estimates from one noisy pilot observation per unicast user and per group.
///
/// Pilot noise is drawn for every user and group even at zero pilot power, so
/// the random stream consumed does not depend on the allocation.
inline ChannelEstimates estimate_channels(const ChannelRealization& realization, const PowerAllocation& alloc,
                                          const LargeScaleProfile& profile, Rng& rng)
{
    detail::require(realization.f.size() == profile.beta.size() && alloc.p_up.size() == profile.beta.size(),
                    "estimate_channels: unicast size mismatch");
    detail::require(realization.g.size() == profile.eta.size() && alloc.q_up.size() == profile.eta.size(),
                    "estimate_channels: group count mismatch");
    const double tau = static_cast<double>(alloc.tau);
    ChannelEstimates out;
    for (std::size_t u = 0; u < realization.f.size(); ++u) {
        const auto& f = realization.f[u];
        const double snr = tau * alloc.p_up[u];
        const double beta = profile.beta[u];
        CVector received = std::sqrt(snr) * f + detail::gaussian_vector(rng, f.size(), 1.0);
        out.f_hat.push_back(std::sqrt(snr) * beta / (1.0 + snr * beta) * received);
    }
    for (std::size_t g = 0; g < realization.g.size(); ++g) {
        const auto& members = realization.g[g];
        const auto& eta = profile.eta[g];
        const auto n = members.front().size();
        CVector received = detail::gaussian_vector(rng, static_cast<std::size_t>(n), 1.0);
        double pilot_gain = 0.0;
        for (std::size_t k = 0; k < members.size(); ++k) {
            received += std::sqrt(tau * alloc.q_up[g][k]) * members[k];
            pilot_gain += tau * alloc.q_up[g][k] * eta[k];
        }
        out.g_hat_composite.push_back(pilot_gain / (1.0 + pilot_gain) * received);
        auto& users = out.g_hat_user.emplace_back();
        for (std::size_t k = 0; k < members.size(); ++k) {
            users.push_back(copilot_scale(alloc.tau, alloc.q_up[g], eta, k) * out.g_hat_composite.back());
        }
    }
    return out;
}

/// MRT precoders scaled to E||v_m||^2 = p_m and E||w_j||^2 = q_j.
inline Precoders mrt_precoders(const ChannelEstimates& estimates, const PowerAllocation& alloc,
                               const EstimationStats& stats)
{
    detail::require(!estimates.f_hat.empty(), "mrt_precoders: no unicast estimates");
    detail::require(estimates.f_hat.size() == alloc.p_dl.size() &&
                        estimates.g_hat_composite.size() == alloc.q_dl.size(),
                    "mrt_precoders: size mismatch");
    const auto n = estimates.f_hat.front().size();
    const double dn = static_cast<double>(n);
    Precoders out;
    out.v = CMatrix::Zero(n, static_cast<Eigen::Index>(alloc.p_dl.size()));
    out.w = CMatrix::Zero(n, static_cast<Eigen::Index>(alloc.q_dl.size()));
    for (std::size_t m = 0; m < alloc.p_dl.size(); ++m) {
        detail::require(alloc.p_dl[m] >= 0.0, "mrt_precoders: negative downlink power");
        if (stats.vartheta[m] > 0.0) {
            out.v.col(static_cast<Eigen::Index>(m)) =
                std::sqrt(alloc.p_dl[m] / (dn * stats.vartheta[m])) * estimates.f_hat[m];
        }
    }
    for (std::size_t j = 0; j < alloc.q_dl.size(); ++j) {
        detail::require(alloc.q_dl[j] >= 0.0, "mrt_precoders: negative downlink power");
        if (stats.gamma[j] > 0.0) {
            out.w.col(static_cast<Eigen::Index>(j)) =
                std::sqrt(alloc.q_dl[j] / (dn * stats.gamma[j])) * estimates.g_hat_composite[j];
        }
    }
    return out;
}

/// Streaming mean and co-moment of a fixed-size sample vector.
template <int Dim>
struct Moments {
    using Vec = Eigen::Matrix<double, Dim, 1>;
    using Mat = Eigen::Matrix<double, Dim, Dim>;

    double count = 0.0;
    Vec mean = Vec::Zero();
    Mat m2 = Mat::Zero();

    void add(const Vec& x)
    {
        count += 1.0;
        const Vec delta = x - mean;
        mean += delta / count;
        m2 += delta * (x - mean).transpose();
    }

    void merge(const Moments& other)
    {
        if (other.count == 0.0) {
            return;
        }
        if (count == 0.0) {
            *this = other;
            return;
        }
        const double total = count + other.count;
        const Vec delta = other.mean - mean;
        mean += delta * (other.count / total);
        m2 += other.m2 + delta * delta.transpose() * (count * other.count / total);
        count = total;
    }

    /// Standard error of the delta-method estimate with the given gradient.
    double std_error(const Vec& gradient) const
    {
        if (count < 2.0) {
            return 0.0;
        }
        const double var = gradient.dot((m2 / (count - 1.0)) * gradient);
        return std::sqrt(std::max(0.0, var) / count);
    }
};

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Decomposition of one user's received signal, empirical next to analytic.
///
/// For unicast user m the "same service" streams are the other unicast
/// precoders and the "cross service" streams are the multicast precoders; for
/// a multicast user it is the other way round.
struct LinkTerms {
    Estimate desired_coefficient_re; ///< Re E[h^H x_own]
    Estimate desired_coefficient_im;
    Estimate desired_power;          ///< |E[h^H x_own]|^2
    Estimate self_variance;          ///< Var[h^H x_own]
    Estimate same_service_interference;
    Estimate cross_service_interference;
    Estimate same_service_term;      ///< self variance + same-service interference
    Estimate empirical_sinr;
    Estimate estimate_variance;      ///< ||h_hat||^2 / N

    double analytic_desired_coefficient = 0.0;
    double analytic_desired_power = 0.0;
    double analytic_same_service_term = 0.0;
    double analytic_cross_service_term = 0.0;
    double analytic_sinr = 0.0;
    double analytic_estimate_variance = 0.0;
};

struct MonteCarloReport {
    std::size_t n_realizations = 0;
    std::uint64_t seed = 0;
    std::vector<LinkTerms> unicast;
    std::vector<std::vector<LinkTerms>> multicast;
    std::vector<Estimate> unicast_precoder_power;   ///< E||v_m||^2
    std::vector<Estimate> multicast_precoder_power; ///< E||w_j||^2
    std::vector<Estimate> composite_estimate_variance; ///< ||g_hat_j||^2 / N
    std::vector<double> analytic_composite_variance;
};

struct MonteCarloOptions {
    std::size_t n_realizations = 20000;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
};

inline constexpr std::size_t kMinRealizations = 100;
inline constexpr std::size_t kMonteCarloBlock = 256;

namespace detail {

using LinkMoments = Moments<6>;
using StreamMoments = Moments<2>;

struct BlockMoments {
    std::vector<LinkMoments> unicast;
    std::vector<std::vector<LinkMoments>> multicast;
    std::vector<StreamMoments> v;
    std::vector<StreamMoments> w;

    explicit BlockMoments(const SystemConfig& config)
        : unicast(config.n_unicast), v(config.n_unicast), w(config.n_groups)
    {
        for (auto k : config.group_sizes) {
            multicast.emplace_back(k);
        }
    }

    void merge(const BlockMoments& other)
    {
        for (std::size_t i = 0; i < unicast.size(); ++i) {
            unicast[i].merge(other.unicast[i]);
            v[i].merge(other.v[i]);
        }
        for (std::size_t g = 0; g < multicast.size(); ++g) {
            w[g].merge(other.w[g]);
            for (std::size_t k = 0; k < multicast[g].size(); ++k) {
                multicast[g][k].merge(other.multicast[g][k]);
            }
        }
    }
};

/// Sample vector: [Re a, Im a, |a|^2, same-service power, cross-service power, ||h_hat||^2/N]
/// where a = h^H x_own.
inline LinkMoments::Vec link_sample(const CVector& h, const CVector& h_hat, const CMatrix& own_service,
                                    Eigen::Index own, const CMatrix& cross_service)
{
    const Eigen::RowVectorXcd same = h.adjoint() * own_service;
    const Eigen::RowVectorXcd cross = h.adjoint() * cross_service;
    const std::complex<double> a = same[own];
    LinkMoments::Vec x;
    x[0] = a.real();
    x[1] = a.imag();
    x[2] = std::norm(a);
    x[3] = same.squaredNorm() - std::norm(a);
    x[4] = cross.squaredNorm();
    x[5] = h_hat.squaredNorm() / static_cast<double>(h_hat.size());
    return x;
}

inline void simulate_realization(const SystemConfig& config, const LargeScaleProfile& profile,
                                 const PowerAllocation& alloc, const EstimationStats& stats,
                                 std::uint64_t seed, std::size_t index, BlockMoments& acc)
{
    Rng rng = substream(seed, index);
    const auto channels = draw_channels(profile, config, rng);
    const auto estimates = estimate_channels(channels, alloc, profile, rng);
    const auto precoders = mrt_precoders(estimates, alloc, stats);
    const double n = static_cast<double>(config.n_antennas);

    for (std::size_t m = 0; m < config.n_unicast; ++m) {
        acc.unicast[m].add(link_sample(channels.f[m], estimates.f_hat[m], precoders.v,
                                       static_cast<Eigen::Index>(m), precoders.w));
        StreamMoments::Vec s;
        s << precoders.v.col(static_cast<Eigen::Index>(m)).squaredNorm(), 0.0;
        acc.v[m].add(s);
    }
    for (std::size_t g = 0; g < config.n_groups; ++g) {
        for (std::size_t k = 0; k < config.group_sizes[g]; ++k) {
            acc.multicast[g][k].add(link_sample(channels.g[g][k], estimates.g_hat_user[g][k], precoders.w,
                                                static_cast<Eigen::Index>(g), precoders.v));
        }
        StreamMoments::Vec s;
        s << precoders.w.col(static_cast<Eigen::Index>(g)).squaredNorm(),
            estimates.g_hat_composite[g].squaredNorm() / n;
        acc.w[g].add(s);
    }
}

inline LinkTerms summarize(const LinkMoments& mom)
{
    using Vec = LinkMoments::Vec;
    const Vec& mu = mom.mean;
    const double re = mu[0];
    const double im = mu[1];
    const double desired = re * re + im * im;
    const double total = mu[2] + mu[3] + mu[4];
    const double denom = 1.0 + total - desired;

    auto unit = [](int i) {
        Vec g = Vec::Zero();
        g[i] = 1.0;
        return g;
    };
    LinkTerms t;
    t.desired_coefficient_re = {re, mom.std_error(unit(0))};
    t.desired_coefficient_im = {im, mom.std_error(unit(1))};

    Vec g = Vec::Zero();
    g << 2 * re, 2 * im, 0, 0, 0, 0;
    t.desired_power = {desired, mom.std_error(g)};

    g << -2 * re, -2 * im, 1, 0, 0, 0;
    t.self_variance = {mu[2] - desired, mom.std_error(g)};

    t.same_service_interference = {mu[3], mom.std_error(unit(3))};
    t.cross_service_interference = {mu[4], mom.std_error(unit(4))};

    g << -2 * re, -2 * im, 1, 1, 0, 0;
    t.same_service_term = {mu[2] + mu[3] - desired, mom.std_error(g)};

    // SINR = D / (1 + X - D), D = |mean a|^2, X = mean total received power.
    const double d_desired = (1.0 + total) / (denom * denom);
    const double d_total = -desired / (denom * denom);
    g << d_desired * 2 * re, d_desired * 2 * im, d_total, d_total, d_total, 0;
    t.empirical_sinr = {desired / denom, mom.std_error(g)};

    t.estimate_variance = {mu[5], mom.std_error(unit(5))};
    return t;
}

} // namespace detail

/// Empirical SINR decomposition for every user under `alloc`, next to the
/// closed-form values.
inline MonteCarloReport empirical_sinr(const SystemConfig& config, const LargeScaleProfile& profile,
                                       const PowerAllocation& alloc, const MonteCarloOptions& options = {})
{
    config.validate();
    profile.validate(config);
    detail::require(options.n_realizations >= kMinRealizations,
                    "empirical_sinr: n_realizations must be at least 100");
    check_feasible(config, alloc);

    const auto stats = estimation_stats(alloc, profile);
    const std::size_t blocks = (options.n_realizations + kMonteCarloBlock - 1) / kMonteCarloBlock;
    std::vector<detail::BlockMoments> partial(blocks, detail::BlockMoments(config));
    parallel_for(blocks, options.threads, [&](std::size_t b) {
        const std::size_t first = b * kMonteCarloBlock;
        const std::size_t last = std::min(options.n_realizations, first + kMonteCarloBlock);
        for (std::size_t r = first; r < last; ++r) {
            detail::simulate_realization(config, profile, alloc, stats, options.seed, r, partial[b]);
        }
    });
    detail::BlockMoments total(config);
    for (const auto& block : partial) {
        total.merge(block);
    }

    const auto unicast_links = sinr_se_unicast(config, stats, alloc, profile);
    const auto multicast_links = sinr_se_multicast(config, stats, alloc, profile);
    const double n = static_cast<double>(config.n_antennas);
    const double p_un = alloc.unicast_power();
    const double p_mu = alloc.multicast_power();

    MonteCarloReport report;
    report.n_realizations = options.n_realizations;
    report.seed = options.seed;
    for (std::size_t m = 0; m < config.n_unicast; ++m) {
        auto t = detail::summarize(total.unicast[m]);
        const double beta = profile.beta[m];
        t.analytic_desired_coefficient = std::sqrt(alloc.p_dl[m] * n * stats.vartheta[m]);
        t.analytic_desired_power = n * alloc.p_dl[m] * stats.vartheta[m];
        t.analytic_same_service_term = beta * p_un;
        t.analytic_cross_service_term = beta * p_mu;
        t.analytic_sinr = unicast_links[m].sinr;
        t.analytic_estimate_variance = stats.vartheta[m];
        report.unicast.push_back(t);

        const auto& v = total.v[m];
        report.unicast_precoder_power.push_back({v.mean[0], v.std_error({1.0, 0.0})});
    }
    for (std::size_t g = 0; g < config.n_groups; ++g) {
        auto& group = report.multicast.emplace_back();
        for (std::size_t k = 0; k < config.group_sizes[g]; ++k) {
            auto t = detail::summarize(total.multicast[g][k]);
            const double eta = profile.eta[g][k];
            t.analytic_desired_coefficient = std::sqrt(alloc.q_dl[g] * n * stats.xi[g][k]);
            t.analytic_desired_power = n * alloc.q_dl[g] * stats.xi[g][k];
            t.analytic_same_service_term = eta * p_mu;
            t.analytic_cross_service_term = eta * p_un;
            t.analytic_sinr = multicast_links[g][k].sinr;
            t.analytic_estimate_variance = stats.xi[g][k];
            group.push_back(t);
        }
        const auto& w = total.w[g];
        report.multicast_precoder_power.push_back({w.mean[0], w.std_error({1.0, 0.0})});
        report.composite_estimate_variance.push_back({w.mean[1], w.std_error({0.0, 1.0})});
        report.analytic_composite_variance.push_back(stats.gamma[g]);
    }
    return report;
}

} // namespace jumm
