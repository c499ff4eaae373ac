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

#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "jumm/closed_form.hpp"
#include "jumm/error.hpp"
#include "support.hpp"

namespace jumm {
namespace {

using testing::rel_diff;

TEST(EstimationVarianceUnicast, NoPilotNoEstimate)
{
    EXPECT_EQ(estimation_variance_unicast(5, 0.0, 0.7), 0.0);
}

TEST(EstimationVarianceUnicast, PerfectCsiLimit)
{
    const double beta = 0.25;
    const double tau = 10.0;
    const double p = 1e3 / (tau * beta);
    const double v = estimation_variance_unicast(10, p, beta);
    EXPECT_LT(v, beta);
    EXPECT_LT((beta - v) / beta, 1e-3);
}

TEST(EstimationVarianceUnicast, HalfAtUnitSnr)
{
    const double beta = 3.0;
    EXPECT_NEAR(estimation_variance_unicast(30, 1.0 / (30.0 * beta), beta), beta / 2.0, 1e-15);
}

TEST(EstimationVarianceUnicast, BelowPrior)
{
    Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
        const double beta = testing::log_uniform(rng, -12.0, 2.0);
        const double p = testing::log_uniform(rng, -3.0, 14.0);
        const double v = estimation_variance_unicast(1 + i % 40, p, beta);
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, beta);
    }
}

TEST(EstimationVarianceMulticast, NoPilotNoEstimate)
{
    const std::vector<double> q{0.0, 0.0, 0.0};
    const std::vector<double> eta{0.5, 1.0, 2.0};
    const auto est = estimation_variance_multicast(7, q, eta);
    EXPECT_EQ(est.gamma, 0.0);
    for (double x : est.xi) {
        EXPECT_EQ(x, 0.0);
    }
    EXPECT_EQ(copilot_scale(7, q, eta, 1), 0.0);
}

TEST(EstimationVarianceMulticast, SingleMemberMatchesUnicast)
{
    const std::vector<double> q{0.37};
    const std::vector<double> eta{1.9};
    const auto est = estimation_variance_multicast(12, q, eta);
    EXPECT_DOUBLE_EQ(est.xi[0], estimation_variance_unicast(12, 0.37, 1.9));
}

TEST(EstimationVarianceMulticast, CopilotProportionality)
{
    Rng rng(17);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t k = testing::uniform_count(rng, 1, 100);
        const std::size_t tau = testing::uniform_count(rng, 1, 200);
        std::vector<double> q;
        std::vector<double> eta;
        for (std::size_t i = 0; i < k; ++i) {
            q.push_back(testing::log_uniform(rng, -4.0, 4.0));
            eta.push_back(testing::log_uniform(rng, -4.0, 2.0));
        }
        const auto est = estimation_variance_multicast(tau, q, eta);
        ASSERT_GT(est.gamma, 0.0);
        for (std::size_t i = 0; i < k; ++i) {
            const double c = copilot_scale(tau, q, eta, i);
            EXPECT_LT(rel_diff(est.xi[i], c * c * est.gamma), 1e-12);
            EXPECT_GE(est.xi[i], 0.0);
            EXPECT_LT(est.xi[i], eta[i]);
        }
    }
}

TEST(EstimationVarianceMulticast, RejectsMismatchedInput)
{
    const std::vector<double> q{1.0};
    const std::vector<double> eta{1.0, 2.0};
    EXPECT_THROW(estimation_variance_multicast(3, q, eta), InvalidArgument);
}

struct SmallCell {
    SystemConfig config = uniform_config(16, 2, {2}, 20, 10.0, 6.0);
    LargeScaleProfile profile{{1.0, 0.5}, {{0.8, 0.3}}};
    PowerAllocation alloc{{3.0, 2.0}, {5.0}, {2.0, 2.0}, {{1.5, 2.0}}, 3};
};

TEST(SinrSe, UnicastFormula)
{
    SmallCell c;
    const auto stats = estimation_stats(c.alloc, c.profile);
    const auto links = sinr_se_unicast(c.config, stats, c.alloc, c.profile);
    for (std::size_t m = 0; m < 2; ++m) {
        const double theta = estimation_variance_unicast(3, c.alloc.p_up[m], c.profile.beta[m]);
        const double sinr = 16.0 * c.alloc.p_dl[m] * theta / (1.0 + c.profile.beta[m] * 10.0);
        EXPECT_DOUBLE_EQ(links[m].sinr, sinr);
        EXPECT_DOUBLE_EQ(links[m].se, (1.0 - 3.0 / 20.0) * std::log2(1.0 + sinr));
    }
}

TEST(SinrSe, MulticastFormula)
{
    SmallCell c;
    const auto stats = estimation_stats(c.alloc, c.profile);
    const auto links = sinr_se_multicast(c.config, stats, c.alloc, c.profile);
    const auto est = estimation_variance_multicast(3, c.alloc.q_up[0], c.profile.eta[0]);
    for (std::size_t k = 0; k < 2; ++k) {
        const double sinr = 16.0 * 5.0 * est.xi[k] / (1.0 + c.profile.eta[0][k] * 10.0);
        EXPECT_DOUBLE_EQ(links[0][k].sinr, sinr);
        EXPECT_DOUBLE_EQ(links[0][k].se, prelog(3, 20) * std::log2(1.0 + sinr));
    }
}

TEST(SinrSe, ZeroDownlinkPowerGivesZero)
{
    SmallCell c;
    c.alloc.p_dl[1] = 0.0;
    c.alloc.q_dl[0] = 0.0;
    const auto se = spectral_efficiencies(c.config, c.alloc, c.profile);
    EXPECT_EQ(se.sinr_unicast[1], 0.0);
    EXPECT_EQ(se.se_unicast[1], 0.0);
    for (double x : se.sinr_multicast[0]) {
        EXPECT_EQ(x, 0.0);
    }
}

TEST(SinrSe, FullPilotBlockGivesZeroSe)
{
    SmallCell c;
    c.alloc.tau = 20;
    c.alloc.p_up = {0.3, 0.3};
    c.alloc.q_up = {{0.3, 0.3}};
    const auto se = spectral_efficiencies(c.config, c.alloc, c.profile);
    EXPECT_GT(se.sinr_unicast[0], 0.0);
    EXPECT_EQ(se.se_unicast[0], 0.0);
    EXPECT_EQ(se.se_multicast[0][1], 0.0);
}

TEST(SinrSe, LinearInAntennas)
{
    SmallCell c;
    const auto a = spectral_efficiencies(c.config, c.alloc, c.profile);
    c.config.n_antennas *= 2;
    const auto b = spectral_efficiencies(c.config, c.alloc, c.profile);
    for (std::size_t m = 0; m < 2; ++m) {
        EXPECT_EQ(b.sinr_unicast[m], 2.0 * a.sinr_unicast[m]);
        EXPECT_EQ(b.sinr_multicast[0][m], 2.0 * a.sinr_multicast[0][m]);
    }
}

TEST(SinrSe, SymmetricGroupMembers)
{
    SmallCell c;
    c.profile.eta = {{0.6, 0.6}};
    c.alloc.q_up = {{1.2, 1.2}};
    const auto se = spectral_efficiencies(c.config, c.alloc, c.profile);
    EXPECT_EQ(se.sinr_multicast[0][0], se.sinr_multicast[0][1]);
}

TEST(SinrSe, SingleMemberGroupMatchesUnicast)
{
    auto config = uniform_config(32, 1, {1}, 20, 10.0, 6.0);
    LargeScaleProfile profile{{0.4}, {{0.4}}};
    PowerAllocation alloc{{2.5}, {2.5}, {1.1}, {{1.1}}, 2};
    const auto se = spectral_efficiencies(config, alloc, profile);
    EXPECT_DOUBLE_EQ(se.sinr_multicast[0][0], se.sinr_unicast[0]);
}

TEST(SinrSe, Monotonicity)
{
    SmallCell c;
    const auto base = spectral_efficiencies(c.config, c.alloc, c.profile);
    auto more_own = c.alloc;
    more_own.p_dl[0] += 1.0;
    more_own.q_dl[0] -= 1.0;
    const auto own = spectral_efficiencies(c.config, more_own, c.profile);
    EXPECT_GT(own.sinr_unicast[0], base.sinr_unicast[0]);
    EXPECT_LT(own.sinr_multicast[0][0], base.sinr_multicast[0][0]);

    auto less_others = c.alloc;
    less_others.p_dl[1] -= 1.0;
    const auto fewer = spectral_efficiencies(c.config, less_others, c.profile);
    EXPECT_GT(fewer.sinr_unicast[0], base.sinr_unicast[0]);
    EXPECT_GT(fewer.sinr_multicast[0][1], base.sinr_multicast[0][1]);
}

TEST(CheckFeasible, PowerBudget)
{
    SmallCell c;
    c.alloc.q_dl[0] = 5.5;
    try {
        check_feasible(c.config, c.alloc);
        FAIL() << "expected InfeasibleAllocation";
    } catch (const InfeasibleAllocation& e) {
        EXPECT_NE(std::string(e.what()).find("P_un + P_mu <= P"), std::string::npos);
    }
    EXPECT_THROW(spectral_efficiencies(c.config, c.alloc, c.profile), InfeasibleAllocation);
}

TEST(CheckFeasible, EnergyBudgetsAndPilotLength)
{
    SmallCell c;
    auto a = c.alloc;
    a.p_up[0] = 2.5; // 3 * 2.5 > 6
    EXPECT_THROW(check_feasible(c.config, a), InfeasibleAllocation);
    a = c.alloc;
    a.q_up[0][1] = 2.1;
    EXPECT_THROW(check_feasible(c.config, a), InfeasibleAllocation);
    a = c.alloc;
    a.tau = 2;
    EXPECT_THROW(check_feasible(c.config, a), InfeasibleAllocation);
    a = c.alloc;
    a.p_dl[0] = -1e-3;
    EXPECT_THROW(check_feasible(c.config, a), InfeasibleAllocation);
    a = c.alloc;
    a.q_up.pop_back();
    EXPECT_THROW(check_feasible(c.config, a), InvalidArgument);
}

TEST(CheckFeasible, ToleranceAtBoundary)
{
    SmallCell c;
    c.alloc.q_dl[0] = 5.0 * (1.0 + 1e-12);
    EXPECT_NO_THROW(check_feasible(c.config, c.alloc));
}

} // namespace
} // namespace jumm
