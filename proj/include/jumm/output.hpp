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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "jumm/error.hpp"
#include "jumm/montecarlo.hpp"
#include "jumm/optimizers.hpp"
#include "jumm/oracle.hpp"

// Serialization of results. Formats are described in docs/formats.md.

namespace jumm {

/// One Pareto sweep at a given antenna count.
struct SweepResult {
    std::size_t n_antennas = 0;
    std::vector<ParetoPoint> points;
    ConvexityReport convexity;
};

inline const std::vector<double>& radial_ratios()
{
    static const std::vector<double> ratios{0.25, 0.5, 0.75};
    return ratios;
}

/// Full-precision scientific notation, e.g. 1.25594321575479000e+14.
inline std::string format_real(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17e", x);
    return buf;
}

inline std::string provenance_lines(const nlohmann::json& provenance)
{
    return "# provenance: " + provenance.dump() + "\n";
}

inline std::string pareto_csv(const std::vector<SweepResult>& sweeps, const nlohmann::json& provenance)
{
    std::string out = provenance_lines(provenance);
    out += "N,p_un,p_mu,o_mu,o_un\n";
    for (const auto& sweep : sweeps) {
        for (const auto& p : sweep.points) {
            out += std::to_string(sweep.n_antennas) + "," + format_real(p.p_un) + "," + format_real(p.p_mu) +
                   "," + format_real(p.o_mu) + "," + format_real(p.o_un) + "\n";
        }
    }
    return out;
}

/// Plot-ready text: one block per antenna count, then one block per radial
/// line (fixed P_un / P across antenna counts). Blocks are separated by two
/// blank lines, gnuplot `index` style.
inline std::string emit_plotdata(const std::vector<SweepResult>& sweeps, const nlohmann::json& provenance)
{
    detail::require(!sweeps.empty(), "emit_plotdata: no sweep results");
    for (const auto& s : sweeps) {
        detail::require(s.points.size() >= 2, "emit_plotdata: every sweep needs points");
    }
    std::string out = provenance_lines(provenance);
    bool first = true;
    auto separate = [&] {
        if (!first) {
            out += "\n\n";
        }
        first = false;
    };
    for (const auto& s : sweeps) {
        separate();
        out += "# series N=" + std::to_string(s.n_antennas) + "\n# o_mu\to_un\tp_un_over_p\n";
        const double total = s.points.back().p_un;
        for (const auto& p : s.points) {
            const double ratio = total > 0.0 ? p.p_un / total : 0.0;
            out += format_real(p.o_mu) + "\t" + format_real(p.o_un) + "\t" + format_real(ratio) + "\n";
        }
    }
    for (double ratio : radial_ratios()) {
        separate();
        const auto& ref = sweeps.front().points;
        const auto index = static_cast<std::size_t>(std::lround(ratio * static_cast<double>(ref.size() - 1)));
        const double actual = static_cast<double>(index) / static_cast<double>(ref.size() - 1);
        out += "# radial p_un_over_p=" + format_real(actual) + "\n# N\to_mu\to_un\n";
        for (const auto& s : sweeps) {
            const auto i = static_cast<std::size_t>(std::lround(actual * static_cast<double>(s.points.size() - 1)));
            const auto& p = s.points[i];
            out += std::to_string(s.n_antennas) + "\t" + format_real(p.o_mu) + "\t" + format_real(p.o_un) + "\n";
        }
    }
    return out;
}

inline nlohmann::json to_json(const ConvexityReport& r)
{
    return {{"is_consistent", r.is_consistent},
            {"max_violation", r.max_violation},
            {"max_slope_violation", r.max_slope_violation},
            {"max_dominance_violation", r.max_dominance_violation},
            {"tolerance", r.tolerance},
            {"scale", r.scale}};
}

inline nlohmann::json to_json(const MmfSolution& s)
{
    return {{"objective", s.objective}, {"common_sinr", s.common_sinr}, {"p_mu", s.p_mu},
            {"q_dl", s.q_dl},           {"q_up", s.q_up},               {"tau", s.tau},
            {"upsilon", s.upsilon},     {"x_star", s.x_star}};
}

inline nlohmann::json to_json(const WsseSolution& s)
{
    nlohmann::json j = {{"objective", s.objective}, {"p_un", s.p_un},   {"p_dl", s.p_dl},
                        {"p_up", s.p_up},           {"tau", s.tau},     {"vartheta_star", s.vartheta_star},
                        {"iterations", s.iterations}};
    j["water_level_nu"] = s.water_level_nu ? nlohmann::json(*s.water_level_nu) : nlohmann::json(nullptr);
    return j;
}

inline nlohmann::json to_json(const Estimate& e) { return {{"value", e.value}, {"std_error", e.std_error}}; }

inline nlohmann::json to_json(const LinkTerms& t)
{
    return {{"desired_coefficient_re", to_json(t.desired_coefficient_re)},
            {"desired_coefficient_im", to_json(t.desired_coefficient_im)},
            {"desired_power", to_json(t.desired_power)},
            {"self_variance", to_json(t.self_variance)},
            {"same_service_interference", to_json(t.same_service_interference)},
            {"cross_service_interference", to_json(t.cross_service_interference)},
            {"same_service_term", to_json(t.same_service_term)},
            {"empirical_sinr", to_json(t.empirical_sinr)},
            {"estimate_variance", to_json(t.estimate_variance)},
            {"analytic",
             {{"desired_coefficient", t.analytic_desired_coefficient},
              {"desired_power", t.analytic_desired_power},
              {"same_service_term", t.analytic_same_service_term},
              {"cross_service_term", t.analytic_cross_service_term},
              {"sinr", t.analytic_sinr},
              {"estimate_variance", t.analytic_estimate_variance}}}};
}

inline nlohmann::json to_json(const MonteCarloReport& r)
{
    nlohmann::json j = {{"n_realizations", r.n_realizations}, {"seed", r.seed}};
    for (const auto& t : r.unicast) {
        j["unicast"].push_back(to_json(t));
    }
    for (const auto& group : r.multicast) {
        nlohmann::json g = nlohmann::json::array();
        for (const auto& t : group) {
            g.push_back(to_json(t));
        }
        j["multicast"].push_back(g);
    }
    for (const auto& e : r.unicast_precoder_power) {
        j["unicast_precoder_power"].push_back(to_json(e));
    }
    for (const auto& e : r.multicast_precoder_power) {
        j["multicast_precoder_power"].push_back(to_json(e));
    }
    for (const auto& e : r.composite_estimate_variance) {
        j["composite_estimate_variance"].push_back(to_json(e));
    }
    j["analytic_composite_variance"] = r.analytic_composite_variance;
    return j;
}

inline nlohmann::json to_json(const PowerAllocation& a)
{
    return {{"p_dl", a.p_dl}, {"q_dl", a.q_dl}, {"p_up", a.p_up}, {"q_up", a.q_up}, {"tau", a.tau}};
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    out << content;
}

} // namespace jumm
