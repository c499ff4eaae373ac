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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "jumm/closed_form.hpp"
#include "jumm/error.hpp"
#include "jumm/experiment.hpp"
#include "jumm/montecarlo.hpp"
#include "jumm/optimizers.hpp"
#include "jumm/oracle.hpp"
#include "jumm/output.hpp"

namespace jumm {

enum class Command { pareto, mmf, wsse, validate, oracle_check };

inline std::optional<Command> parse_command(std::string_view name)
{
    if (name == "pareto") return Command::pareto;
    if (name == "mmf") return Command::mmf;
    if (name == "wsse") return Command::wsse;
    if (name == "validate") return Command::validate;
    if (name == "oracle-check") return Command::oracle_check;
    return std::nullopt;
}

inline std::string_view command_name(Command c)
{
    switch (c) {
    case Command::pareto: return "pareto";
    case Command::mmf: return "mmf";
    case Command::wsse: return "wsse";
    case Command::validate: return "validate";
    case Command::oracle_check: return "oracle-check";
    }
    return "?";
}

/// Command-line overrides; powers are noise-normalized.
struct RunOptions {
    std::optional<std::string> config_path;
    std::optional<double> p_un;
    std::optional<double> p_mu;
    std::optional<std::size_t> n_antennas;
    std::optional<std::size_t> points;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::size_t> threads;
};

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfig = 2,
    kExitInfeasible = 3,
    kExitNumerical = 4,
    kExitCheckFailed = 5,
};

namespace detail {

inline ExperimentConfig apply_overrides(ExperimentConfig cfg, const RunOptions& opt)
{
    if (opt.n_antennas) {
        detail::require_field(*opt.n_antennas >= 1, "--n", "must be positive");
        cfg.scenario.n_antennas = *opt.n_antennas;
        cfg.sweep.n_values = {*opt.n_antennas};
    }
    if (opt.points) {
        cfg.sweep.n_points = *opt.points;
    }
    if (opt.seed) {
        cfg.montecarlo.seed = *opt.seed;
        if (cfg.scenario.geometry && cfg.scenario.geometry->seed) {
            cfg.scenario.geometry->seed = *opt.seed;
        }
    }
    if (opt.out_dir) {
        cfg.output.directory = *opt.out_dir;
    }
    if (opt.threads) {
        cfg.montecarlo.threads = *opt.threads;
    }
    return cfg;
}

inline nlohmann::json provenance(Command command, const ExperimentConfig& cfg, const ResolvedScenario& cell)
{
    const auto& sys = cell.system;
    double e_min = sys.unicast_energy_budgets.front();
    double e_max = e_min;
    auto track = [&](double e) {
        e_min = std::min(e_min, e);
        e_max = std::max(e_max, e);
    };
    for (double e : sys.unicast_energy_budgets) track(e);
    for (const auto& g : sys.multicast_energy_budgets) for (double e : g) track(e);
    return {{"tool", "jumm"},
            {"command", command_name(command)},
            {"config", to_json(cfg)},
            {"normalized",
             {{"total_dl_power", sys.total_dl_power},
              {"energy_budget_min", e_min},
              {"energy_budget_max", e_max},
              {"noise_power_w", cell.noise_power_w},
              {"convention", kEnergyConvention}}}};
}

/// Split the command line asks for. Either side may be given; the missing
/// side defaults to what is left of P (or P/2 if neither is given).
struct Split {
    double p_un;
    double p_mu;
};

inline Split resolve_split(const RunOptions& opt, double total, double default_p_un)
{
    auto check = [&](double v, const char* flag) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw InfeasibleAllocation(std::string(flag) + " must be a finite nonnegative power");
        }
        if (v > total) {
            throw InfeasibleAllocation(std::string(flag) + "=" + format_real(v) +
                                       " exceeds P=" + format_real(total) +
                                       " (constraint P_un + P_mu <= P)");
        }
    };
    if (opt.p_un) check(*opt.p_un, "--p-un");
    if (opt.p_mu) check(*opt.p_mu, "--p-mu");
    if (opt.p_un && opt.p_mu) {
        if (*opt.p_un + *opt.p_mu > total * (1.0 + kFeasibilityRelTol)) {
            throw InfeasibleAllocation("--p-un + --p-mu = " + format_real(*opt.p_un + *opt.p_mu) +
                                       " exceeds P=" + format_real(total) + " (constraint P_un + P_mu <= P)");
        }
        return {*opt.p_un, *opt.p_mu};
    }
    if (opt.p_un) return {*opt.p_un, total - *opt.p_un};
    if (opt.p_mu) return {total - *opt.p_mu, *opt.p_mu};
    return {default_p_un, total - default_p_un};
}

struct TinyInstance {
    SystemConfig config;
    LargeScaleProfile profile;
};

/// Small random cell within the oracle's limits (U <= 3, G <= 2, K_g <= 2).
inline TinyInstance tiny_instance(std::uint64_t seed, std::size_t index)
{
    Rng rng = substream(seed, index);
    std::uniform_int_distribution<std::size_t> users(1, 3);
    std::uniform_int_distribution<std::size_t> groups(1, 2);
    std::uniform_int_distribution<std::size_t> members(1, 2);
    std::uniform_real_distribution<double> log_gain(-1.0, 1.0);
    std::uniform_real_distribution<double> energy(1.0, 40.0);
    std::uniform_int_distribution<std::size_t> antennas(4, 64);

    TinyInstance out;
    auto& c = out.config;
    c.n_antennas = antennas(rng);
    c.n_unicast = users(rng);
    c.n_groups = groups(rng);
    for (std::size_t g = 0; g < c.n_groups; ++g) {
        c.group_sizes.push_back(members(rng));
    }
    c.coherence_symbols = 20;
    c.total_dl_power = 10.0;
    for (std::size_t m = 0; m < c.n_unicast; ++m) {
        c.unicast_energy_budgets.push_back(energy(rng));
        out.profile.beta.push_back(std::pow(10.0, log_gain(rng)));
    }
    for (auto k : c.group_sizes) {
        auto& e = c.multicast_energy_budgets.emplace_back();
        auto& eta = out.profile.eta.emplace_back();
        for (std::size_t i = 0; i < k; ++i) {
            e.push_back(energy(rng));
            eta.push_back(std::pow(10.0, log_gain(rng)));
        }
    }
    return out;
}

inline bool oracle_within(double oracle, double closed_form)
{
    return oracle <= closed_form + 1e-9 * std::max(1.0, std::abs(closed_form));
}

inline int run_pareto(const ExperimentConfig& cfg, std::ostream& out)
{
    auto n_values = cfg.sweep.n_values;
    std::sort(n_values.begin(), n_values.end());
    std::vector<SweepResult> sweeps;
    nlohmann::json prov;
    bool all_convex = true;
    for (auto n : n_values) {
        const auto cell = resolve_scenario(cfg.scenario, n);
        if (prov.is_null()) {
            prov = provenance(Command::pareto, cfg, cell);
        }
        SweepResult s;
        s.n_antennas = n;
        s.points = pareto_sweep(cell.system, cell.profile, cfg.sweep.n_points, cfg.montecarlo.threads);
        s.convexity = check_convexity(s.points);
        all_convex = all_convex && s.convexity.is_consistent;
        sweeps.push_back(std::move(s));
    }

    const std::filesystem::path dir(cfg.output.directory);
    std::filesystem::create_directories(dir);
    const auto& formats = cfg.output.formats;
    if (std::find(formats.begin(), formats.end(), "csv") != formats.end()) {
        write_text_file(dir / "pareto.csv", pareto_csv(sweeps, prov));
    }
    if (std::find(formats.begin(), formats.end(), "plot") != formats.end()) {
        write_text_file(dir / "pareto_plot.dat", emit_plotdata(sweeps, prov));
    }
    nlohmann::json report = {{"provenance", prov}, {"all_consistent", all_convex}};
    for (const auto& s : sweeps) {
        auto entry = to_json(s.convexity);
        entry["N"] = s.n_antennas;
        report["sweeps"].push_back(entry);
    }
    write_text_file(dir / "convexity.json", report.dump(2) + "\n");
    for (const auto& s : sweeps) {
        out << "N=" << s.n_antennas << " points=" << s.points.size()
            << " convex=" << (s.convexity.is_consistent ? "yes" : "no")
            << " max_violation=" << format_real(s.convexity.max_violation) << "\n";
    }
    return all_convex ? kExitOk : kExitCheckFailed;
}

inline int run_solver(Command command, const ExperimentConfig& cfg, const RunOptions& opt, std::ostream& out)
{
    const auto cell = resolve_scenario(cfg.scenario, cfg.scenario.n_antennas);
    const double total = cell.system.total_dl_power;
    const auto split = resolve_split(opt, total, 0.5 * total);
    nlohmann::json doc = {{"provenance", provenance(command, cfg, cell)}};
    std::string name;
    if (command == Command::mmf) {
        const auto sol = solve_mmf(cell.system, cell.profile, split.p_un);
        doc["p_un"] = split.p_un;
        doc["solution"] = to_json(sol);
        out << "mmf objective=" << format_real(sol.objective) << " bit/s/Hz\n";
        name = "mmf.json";
    } else {
        const auto sol = solve_wsse(cell.system, cell.profile, split.p_mu);
        doc["p_mu"] = split.p_mu;
        doc["solution"] = to_json(sol);
        out << "wsse objective=" << format_real(sol.objective) << " bit/s/Hz\n";
        name = "wsse.json";
    }
    const std::filesystem::path dir(cfg.output.directory);
    std::filesystem::create_directories(dir);
    write_text_file(dir / name, doc.dump(2) + "\n");
    return kExitOk;
}

inline int run_validate(const ExperimentConfig& cfg, const RunOptions& opt, std::ostream& out)
{
    const auto cell = resolve_scenario(cfg.scenario, cfg.scenario.n_antennas);
    const double total = cell.system.total_dl_power;
    const auto split = resolve_split(opt, total, cfg.montecarlo.p_un_fraction * total);
    const auto point = pareto_point(cell.system, cell.profile, split.p_un);
    const auto alloc = combine(point.mmf, point.wsse);
    const auto report = empirical_sinr(cell.system, cell.profile, alloc,
                                       {cfg.montecarlo.n_realizations, cfg.montecarlo.seed, cfg.montecarlo.threads});

    double worst_sinr = 0.0;
    double worst_sigma = 0.0;
    auto visit = [&](const LinkTerms& t) {
        if (t.analytic_sinr > 0.0) {
            worst_sinr = std::max(worst_sinr, std::abs(t.empirical_sinr.value / t.analytic_sinr - 1.0));
        }
        auto sigma = [](const Estimate& e, double truth) {
            return e.std_error > 0.0 ? std::abs(e.value - truth) / e.std_error : (e.value == truth ? 0.0 : 1e300);
        };
        worst_sigma = std::max({worst_sigma, sigma(t.same_service_term, t.analytic_same_service_term),
                                sigma(t.cross_service_interference, t.analytic_cross_service_term),
                                sigma(t.desired_coefficient_re, t.analytic_desired_coefficient)});
    };
    for (const auto& t : report.unicast) visit(t);
    for (const auto& g : report.multicast) for (const auto& t : g) visit(t);
    double worst_precoder = 0.0;
    for (std::size_t m = 0; m < alloc.p_dl.size(); ++m) {
        if (alloc.p_dl[m] > 0.0) {
            worst_precoder = std::max(worst_precoder,
                                      std::abs(report.unicast_precoder_power[m].value / alloc.p_dl[m] - 1.0));
        }
    }
    for (std::size_t j = 0; j < alloc.q_dl.size(); ++j) {
        if (alloc.q_dl[j] > 0.0) {
            worst_precoder = std::max(worst_precoder,
                                      std::abs(report.multicast_precoder_power[j].value / alloc.q_dl[j] - 1.0));
        }
    }
    const bool pass = worst_sinr <= 0.05 && worst_sigma <= 3.0 && worst_precoder <= 0.02;

    nlohmann::json doc = {{"provenance", provenance(Command::validate, cfg, cell)},
                          {"p_un", point.p_un},
                          {"p_mu", point.p_mu},
                          {"allocation", to_json(alloc)},
                          {"report", to_json(report)},
                          {"checks",
                           {{"max_sinr_relative_error", worst_sinr},
                            {"max_term_deviation_sigmas", worst_sigma},
                            {"max_precoder_power_relative_error", worst_precoder},
                            {"sinr_tolerance", 0.05},
                            {"term_tolerance_sigmas", 3.0},
                            {"precoder_tolerance", 0.02},
                            {"pass", pass}}}};
    const std::filesystem::path dir(cfg.output.directory);
    std::filesystem::create_directories(dir);
    write_text_file(dir / "montecarlo.json", doc.dump(2) + "\n");
    out << "validate realizations=" << report.n_realizations << " max_sinr_rel_err=" << format_real(worst_sinr)
        << " max_term_sigmas=" << format_real(worst_sigma) << " " << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? kExitOk : kExitCheckFailed;
}

inline int run_oracle_check(const ExperimentConfig& cfg, std::ostream& out)
{
    constexpr std::size_t instances = 6;
    constexpr std::uint64_t suite_seed = 20180415;
    nlohmann::json rows = nlohmann::json::array();
    bool all = true;
    for (std::size_t i = 0; i < instances; ++i) {
        const auto inst = tiny_instance(suite_seed, i);
        const double total = inst.config.total_dl_power;
        const double p_un = 0.3 * total;
        const double p_mu = 0.4 * total;
        const auto mmf = solve_mmf(inst.config, inst.profile, p_un);
        const auto mmf_oracle = brute_force_oracle(inst.config, inst.profile, OracleObjective::mmf, p_un,
                                                   {1000, 11});
        const auto wsse = solve_wsse(inst.config, inst.profile, p_mu);
        const auto wsse_oracle = brute_force_oracle(inst.config, inst.profile, OracleObjective::wsse, p_mu,
                                                    {300, 11});
        const bool ok_mmf = oracle_within(mmf_oracle.objective, mmf.objective);
        const bool ok_wsse = oracle_within(wsse_oracle.objective, wsse.objective);
        all = all && ok_mmf && ok_wsse;
        rows.push_back({{"instance", i},
                        {"n_unicast", inst.config.n_unicast},
                        {"group_sizes", inst.config.group_sizes},
                        {"mmf_closed_form", mmf.objective},
                        {"mmf_oracle", mmf_oracle.objective},
                        {"mmf_pass", ok_mmf},
                        {"wsse_closed_form", wsse.objective},
                        {"wsse_oracle", wsse_oracle.objective},
                        {"wsse_pass", ok_wsse}});
        out << "instance " << i << " mmf " << (ok_mmf ? "PASS" : "FAIL") << " wsse " << (ok_wsse ? "PASS" : "FAIL")
            << "\n";
    }
    nlohmann::json doc = {{"provenance",
                           {{"tool", "jumm"}, {"command", "oracle-check"}, {"suite_seed", suite_seed},
                            {"instances", instances}}},
                          {"instances", rows},
                          {"all_pass", all}};
    const std::filesystem::path dir(cfg.output.directory);
    std::filesystem::create_directories(dir);
    write_text_file(dir / "oracle_check.json", doc.dump(2) + "\n");
    return all ? kExitOk : kExitCheckFailed;
}

inline void report_error(std::ostream& err, std::string_view kind, std::string_view field, std::string_view message)
{
    nlohmann::json j = {{"error", {{"kind", kind}, {"message", message}}}};
    if (!field.empty()) {
        j["error"]["field"] = field;
    }
    err << j.dump() << "\n";
}

} // namespace detail

/// Executes one command. Diagnostics go to `err` as one JSON object per line.
inline int run(Command command, const RunOptions& options, std::ostream& out, std::ostream& err)
{
    try {
        ExperimentConfig cfg = options.config_path ? load_experiment(*options.config_path) : default_experiment();
        cfg = detail::apply_overrides(std::move(cfg), options);
        validate_experiment(cfg);
        switch (command) {
        case Command::pareto: return detail::run_pareto(cfg, out);
        case Command::mmf:
        case Command::wsse: return detail::run_solver(command, cfg, options, out);
        case Command::validate: return detail::run_validate(cfg, options, out);
        case Command::oracle_check: return detail::run_oracle_check(cfg, out);
        }
    } catch (const ConfigError& e) {
        detail::report_error(err, "config", e.field(), e.what());
        return kExitConfig;
    } catch (const InfeasibleAllocation& e) {
        detail::report_error(err, "infeasible", "", e.what());
        return kExitInfeasible;
    } catch (const NumericalError& e) {
        detail::report_error(err, "numerical", "", e.what());
        return kExitNumerical;
    } catch (const std::exception& e) {
        detail::report_error(err, "error", "", e.what());
        return kExitFailure;
    }
    return kExitFailure;
}

} // namespace jumm
