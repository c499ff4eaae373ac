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
#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "jumm/error.hpp"
#include "jumm/scenario.hpp"

/**
 * @file experiment.hpp
 * Experiment configuration file: parsing with field-level diagnostics,
 * defaults, and resolution into a SystemConfig plus large-scale profile.
 *
 * The layout is documented in docs/config.md. Every object rejects unknown
 * keys; every error names the dotted path of the offending field.
 */

namespace jumm {

using Json = nlohmann::json;

inline constexpr const char* kEnergyConvention =
    "noise-normalized: power q <-> q*sigma2*W watts; symbol duration 1/W; pilot energy E <-> E*sigma2 joules";

struct GeometrySpec {
    double cell_radius_m = kDefaultCellRadius;
    double exclusion_radius_m = kDefaultExclusionRadius;
    double pathloss_exponent = PathLossModel{}.exponent;
    double attenuation = PathLossModel{}.attenuation;
    std::optional<std::uint64_t> seed = 1;
    std::optional<std::vector<double>> unicast_distances_m;
    std::optional<std::vector<std::vector<double>>> multicast_distances_m;
};

struct ScenarioSpec {
    std::size_t n_antennas = 100;
    std::size_t n_unicast = 20;
    std::size_t n_groups = 10;
    std::vector<std::size_t> group_sizes = std::vector<std::size_t>(10, 100);
    std::size_t coherence_symbols = 200;
    std::optional<std::size_t> pilot_length;
    std::optional<std::vector<double>> unicast_weights;
    std::string units = "physical"; ///< "physical" or "normalized"
    double total_dl_power = 10.0;   ///< W, or noise-normalized
    double pilot_energy = 2e-6;     ///< J, or noise-normalized; default for every user
    std::optional<std::vector<double>> unicast_energy_budgets;
    std::optional<std::vector<std::vector<double>>> multicast_energy_budgets;
    double bandwidth_hz = 20e6;
    double noise_psd_dbm_per_hz = -174.0;
    std::optional<GeometrySpec> geometry = GeometrySpec{};
    std::optional<LargeScaleProfile> profile; ///< explicit coefficients instead of geometry
};

struct SweepSpec {
    std::size_t n_points = 21;
    std::vector<std::size_t> n_values{50, 100, 200};
};

struct MonteCarloSpec {
    std::size_t n_realizations = 20000;
    std::uint64_t seed = 1;
    std::size_t threads = 1; ///< workers for sweeps and Monte Carlo; never echoed into outputs
    double p_un_fraction = 0.5; ///< power split used by `validate`
};

struct OutputSpec {
    std::string directory = ".";
    std::vector<std::string> formats{"csv", "plot"};
};

struct ExperimentConfig {
    ScenarioSpec scenario;
    SweepSpec sweep;
    MonteCarloSpec montecarlo;
    OutputSpec output;
};

/// Cell ready for the solvers, plus what it was derived from.
struct ResolvedScenario {
    SystemConfig system;
    LargeScaleProfile profile;
    std::optional<CellGeometry> geometry;
    double noise_power_w = 0.0; ///< sigma^2 W, zero for normalized input
};

namespace detail {

class JsonReader {
public:
    JsonReader(const Json& node, std::string path) : node_(node), path_(std::move(path))
    {
        if (!node_.is_object()) {
            throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
        }
    }

    void allow_only(std::initializer_list<const char*> keys) const
    {
        std::set<std::string> allowed(keys.begin(), keys.end());
        for (auto it = node_.begin(); it != node_.end(); ++it) {
            if (!allowed.count(it.key())) {
                throw ConfigError(field(it.key()), "unknown key");
            }
        }
    }

    bool has(const std::string& key) const { return node_.contains(key); }
    const Json& at(const std::string& key) const { return node_.at(key); }
    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    double number(const std::string& key) const
    {
        require_key(key);
        return as_number(node_.at(key), field(key));
    }

    std::size_t count(const std::string& key) const
    {
        require_key(key);
        return as_count(node_.at(key), field(key));
    }

    std::string text(const std::string& key) const
    {
        require_key(key);
        if (!node_.at(key).is_string()) {
            throw ConfigError(field(key), "expected a string");
        }
        return node_.at(key).get<std::string>();
    }

    template <typename T, typename Get>
    void optional(const std::string& key, T& out, Get get) const
    {
        if (has(key)) {
            out = get(key);
        }
    }

    std::vector<double> numbers(const std::string& key) const
    {
        require_key(key);
        return as_numbers(node_.at(key), field(key));
    }

    std::vector<std::vector<double>> nested_numbers(const std::string& key) const
    {
        require_key(key);
        const auto& arr = node_.at(key);
        if (!arr.is_array()) {
            throw ConfigError(field(key), "expected an array of arrays");
        }
        std::vector<std::vector<double>> out;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            out.push_back(as_numbers(arr[i], field(key) + "[" + std::to_string(i) + "]"));
        }
        return out;
    }

    std::vector<std::size_t> counts(const std::string& key) const
    {
        require_key(key);
        const auto& arr = node_.at(key);
        if (!arr.is_array()) {
            throw ConfigError(field(key), "expected an array");
        }
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            out.push_back(as_count(arr[i], field(key) + "[" + std::to_string(i) + "]"));
        }
        return out;
    }

    void require_key(const std::string& key) const
    {
        if (!has(key)) {
            throw ConfigError(field(key), "missing required field");
        }
    }

    static double as_number(const Json& v, const std::string& path)
    {
        if (!v.is_number()) {
            throw ConfigError(path, "expected a number");
        }
        const double x = v.get<double>();
        if (!std::isfinite(x)) {
            throw ConfigError(path, "must be finite");
        }
        return x;
    }

    static std::size_t as_count(const Json& v, const std::string& path)
    {
        if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<long long>() < 0)) {
            throw ConfigError(path, "expected a nonnegative integer");
        }
        return v.get<std::size_t>();
    }

    static std::vector<double> as_numbers(const Json& v, const std::string& path)
    {
        if (!v.is_array()) {
            throw ConfigError(path, "expected an array of numbers");
        }
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
        }
        return out;
    }

private:
    const Json& node_;
    std::string path_;
};

inline void require_field(bool ok, const std::string& field, const std::string& message)
{
    if (!ok) {
        throw ConfigError(field, message);
    }
}

inline GeometrySpec parse_geometry(const Json& node, const std::string& path)
{
    JsonReader r(node, path);
    r.allow_only({"cell_radius_m", "exclusion_radius_m", "pathloss_exponent", "attenuation", "seed",
                  "unicast_distances_m", "multicast_distances_m"});
    GeometrySpec g;
    g.seed.reset();
    r.optional("cell_radius_m", g.cell_radius_m, [&](auto& k) { return r.number(k); });
    r.optional("exclusion_radius_m", g.exclusion_radius_m, [&](auto& k) { return r.number(k); });
    r.optional("pathloss_exponent", g.pathloss_exponent, [&](auto& k) { return r.number(k); });
    r.optional("attenuation", g.attenuation, [&](auto& k) { return r.number(k); });
    if (r.has("seed")) {
        g.seed = static_cast<std::uint64_t>(r.count("seed"));
    }
    if (r.has("unicast_distances_m")) {
        g.unicast_distances_m = r.numbers("unicast_distances_m");
    }
    if (r.has("multicast_distances_m")) {
        g.multicast_distances_m = r.nested_numbers("multicast_distances_m");
    }
    const bool explicit_drop = g.unicast_distances_m.has_value() || g.multicast_distances_m.has_value();
    require_field(g.unicast_distances_m.has_value() == g.multicast_distances_m.has_value(),
                  r.field(g.unicast_distances_m ? "multicast_distances_m" : "unicast_distances_m"),
                  "explicit distances need both unicast_distances_m and multicast_distances_m");
    require_field(!(explicit_drop && g.seed), r.field("seed"), "give either a seed or explicit distances");
    require_field(explicit_drop || g.seed, r.field("seed"), "missing required field (or explicit distances)");
    require_field(g.cell_radius_m > 0.0, r.field("cell_radius_m"), "must be positive");
    require_field(g.exclusion_radius_m >= 0.0 && g.exclusion_radius_m < g.cell_radius_m,
                  r.field("exclusion_radius_m"), "must lie in [0, cell_radius_m)");
    require_field(g.pathloss_exponent > 0.0, r.field("pathloss_exponent"), "must be positive");
    require_field(g.attenuation > 0.0, r.field("attenuation"), "must be positive");
    return g;
}

inline ScenarioSpec parse_scenario(const Json& node)
{
    JsonReader r(node, "scenario");
    r.allow_only({"n_antennas", "n_unicast", "n_groups", "group_sizes", "coherence_symbols", "pilot_length",
                  "unicast_weights", "units", "total_dl_power", "pilot_energy", "unicast_energy_budgets",
                  "multicast_energy_budgets", "bandwidth_hz", "noise_psd_dbm_per_hz", "geometry", "profile"});
    ScenarioSpec s;
    s.n_antennas = r.count("n_antennas");
    s.n_unicast = r.count("n_unicast");
    s.n_groups = r.count("n_groups");
    require_field(s.n_antennas >= 1, r.field("n_antennas"), "must be positive");
    require_field(s.n_unicast >= 1, r.field("n_unicast"), "must be positive");
    require_field(s.n_groups >= 1, r.field("n_groups"), "must be positive");
    r.require_key("group_sizes");
    if (r.at("group_sizes").is_array()) {
        s.group_sizes = r.counts("group_sizes");
        require_field(s.group_sizes.size() == s.n_groups, r.field("group_sizes"), "must have n_groups entries");
    } else {
        s.group_sizes.assign(s.n_groups, r.count("group_sizes"));
    }
    for (auto k : s.group_sizes) {
        require_field(k >= 1, r.field("group_sizes"), "every group needs at least one member");
    }
    s.coherence_symbols = r.count("coherence_symbols");
    if (r.has("pilot_length")) {
        s.pilot_length = r.count("pilot_length");
        require_field(*s.pilot_length >= s.n_unicast + s.n_groups && *s.pilot_length <= s.coherence_symbols,
                      r.field("pilot_length"), "must lie in [n_unicast + n_groups, coherence_symbols]");
    }
    require_field(s.n_unicast + s.n_groups <= s.coherence_symbols, r.field("coherence_symbols"),
                  "must be at least n_unicast + n_groups");
    if (r.has("unicast_weights")) {
        s.unicast_weights = r.numbers("unicast_weights");
        require_field(s.unicast_weights->size() == s.n_unicast, r.field("unicast_weights"),
                      "must have n_unicast entries");
        for (double a : *s.unicast_weights) {
            require_field(a > 0.0, r.field("unicast_weights"), "entries must be positive");
        }
    }

    s.units = r.has("units") ? r.text("units") : "physical";
    require_field(s.units == "physical" || s.units == "normalized", r.field("units"),
                  "must be \"physical\" or \"normalized\"");
    s.total_dl_power = r.number("total_dl_power");
    require_field(s.total_dl_power > 0.0, r.field("total_dl_power"), "must be positive");
    const bool all_listed = r.has("unicast_energy_budgets") && r.has("multicast_energy_budgets");
    if (all_listed && !r.has("pilot_energy")) {
        s.pilot_energy = 0.0;
    } else {
        s.pilot_energy = r.number("pilot_energy");
        require_field(s.pilot_energy > 0.0, r.field("pilot_energy"), "must be positive");
    }
    if (r.has("unicast_energy_budgets")) {
        s.unicast_energy_budgets = r.numbers("unicast_energy_budgets");
        require_field(s.unicast_energy_budgets->size() == s.n_unicast, r.field("unicast_energy_budgets"),
                      "must have n_unicast entries");
        for (double e : *s.unicast_energy_budgets) {
            require_field(e > 0.0, r.field("unicast_energy_budgets"), "entries must be positive");
        }
    }
    if (r.has("multicast_energy_budgets")) {
        s.multicast_energy_budgets = r.nested_numbers("multicast_energy_budgets");
        const auto& m = *s.multicast_energy_budgets;
        require_field(m.size() == s.n_groups, r.field("multicast_energy_budgets"), "must have n_groups entries");
        for (std::size_t g = 0; g < m.size(); ++g) {
            require_field(m[g].size() == s.group_sizes[g], r.field("multicast_energy_budgets"),
                          "group " + std::to_string(g) + " size must match group_sizes");
            for (double e : m[g]) {
                require_field(e > 0.0, r.field("multicast_energy_budgets"), "entries must be positive");
            }
        }
    }
    if (s.units == "physical") {
        s.bandwidth_hz = r.number("bandwidth_hz");
        s.noise_psd_dbm_per_hz = r.number("noise_psd_dbm_per_hz");
        require_field(s.bandwidth_hz > 0.0, r.field("bandwidth_hz"), "must be positive");
    } else {
        require_field(!r.has("bandwidth_hz"), r.field("bandwidth_hz"), "only valid with units = physical");
        require_field(!r.has("noise_psd_dbm_per_hz"), r.field("noise_psd_dbm_per_hz"),
                      "only valid with units = physical");
    }

    require_field(r.has("geometry") != r.has("profile"), r.field("geometry"),
                  "exactly one of geometry or profile is required");
    s.geometry.reset();
    if (r.has("geometry")) {
        s.geometry = parse_geometry(r.at("geometry"), r.field("geometry"));
        if (s.geometry->unicast_distances_m) {
            const std::string path = r.field("geometry");
            require_field(s.geometry->unicast_distances_m->size() == s.n_unicast,
                          path + ".unicast_distances_m", "must have n_unicast entries");
            require_field(s.geometry->multicast_distances_m->size() == s.n_groups,
                          path + ".multicast_distances_m", "must have n_groups entries");
            for (std::size_t g = 0; g < s.n_groups; ++g) {
                require_field((*s.geometry->multicast_distances_m)[g].size() == s.group_sizes[g],
                              path + ".multicast_distances_m", "group sizes must match group_sizes");
            }
            auto in_cell = [&](double x) {
                return x >= s.geometry->exclusion_radius_m && x <= s.geometry->cell_radius_m;
            };
            for (double x : *s.geometry->unicast_distances_m) {
                require_field(in_cell(x), path + ".unicast_distances_m",
                              "distances must lie in [exclusion_radius_m, cell_radius_m]");
            }
            for (const auto& group : *s.geometry->multicast_distances_m) {
                for (double x : group) {
                    require_field(in_cell(x), path + ".multicast_distances_m",
                                  "distances must lie in [exclusion_radius_m, cell_radius_m]");
                }
            }
        }
    } else {
        JsonReader p(r.at("profile"), r.field("profile"));
        p.allow_only({"beta", "eta"});
        LargeScaleProfile profile;
        profile.beta = p.numbers("beta");
        profile.eta = p.nested_numbers("eta");
        require_field(profile.beta.size() == s.n_unicast, p.field("beta"), "must have n_unicast entries");
        require_field(profile.eta.size() == s.n_groups, p.field("eta"), "must have n_groups entries");
        for (double b : profile.beta) {
            require_field(b > 0.0, p.field("beta"), "entries must be positive");
        }
        for (std::size_t g = 0; g < s.n_groups; ++g) {
            require_field(profile.eta[g].size() == s.group_sizes[g], p.field("eta"),
                          "group sizes must match group_sizes");
            for (double e : profile.eta[g]) {
                require_field(e > 0.0, p.field("eta"), "entries must be positive");
            }
        }
        s.profile = std::move(profile);
    }
    return s;
}

} // namespace detail

inline ExperimentConfig parse_experiment(const Json& root)
{
    detail::JsonReader r(root, "");
    r.allow_only({"scenario", "sweep", "montecarlo", "output"});
    ExperimentConfig cfg;
    r.require_key("scenario");
    cfg.scenario = detail::parse_scenario(r.at("scenario"));

    if (r.has("sweep")) {
        detail::JsonReader s(r.at("sweep"), "sweep");
        s.allow_only({"n_points", "n_values"});
        s.optional("n_points", cfg.sweep.n_points, [&](auto& k) { return s.count(k); });
        s.optional("n_values", cfg.sweep.n_values, [&](auto& k) { return s.counts(k); });
    }
    if (r.has("montecarlo")) {
        detail::JsonReader m(r.at("montecarlo"), "montecarlo");
        m.allow_only({"n_realizations", "seed", "threads", "p_un_fraction"});
        m.optional("n_realizations", cfg.montecarlo.n_realizations, [&](auto& k) { return m.count(k); });
        m.optional("seed", cfg.montecarlo.seed, [&](auto& k) { return static_cast<std::uint64_t>(m.count(k)); });
        m.optional("threads", cfg.montecarlo.threads, [&](auto& k) { return m.count(k); });
        m.optional("p_un_fraction", cfg.montecarlo.p_un_fraction, [&](auto& k) { return m.number(k); });
    }
    if (r.has("output")) {
        detail::JsonReader o(r.at("output"), "output");
        o.allow_only({"directory", "formats"});
        o.optional("directory", cfg.output.directory, [&](auto& k) { return o.text(k); });
        if (o.has("formats")) {
            const auto& arr = o.at("formats");
            detail::require_field(arr.is_array(), o.field("formats"), "expected an array of strings");
            cfg.output.formats.clear();
            for (const auto& f : arr) {
                detail::require_field(f.is_string() && (f == "csv" || f == "plot"), o.field("formats"),
                                      "entries must be \"csv\" or \"plot\"");
                cfg.output.formats.push_back(f.get<std::string>());
            }
        }
    }
    return cfg;
}

/// Checks that apply after command-line overrides.
inline void validate_experiment(const ExperimentConfig& cfg)
{
    detail::require_field(cfg.sweep.n_points >= 3, "sweep.n_points", "must be at least 3");
    detail::require_field(!cfg.sweep.n_values.empty(), "sweep.n_values", "must not be empty");
    std::set<std::size_t> seen;
    for (auto n : cfg.sweep.n_values) {
        detail::require_field(n >= 1, "sweep.n_values", "antenna counts must be positive");
        detail::require_field(seen.insert(n).second, "sweep.n_values", "antenna counts must be distinct");
    }
    detail::require_field(cfg.montecarlo.n_realizations >= 100, "montecarlo.n_realizations",
                          "must be at least 100");
    detail::require_field(cfg.montecarlo.p_un_fraction >= 0.0 && cfg.montecarlo.p_un_fraction <= 1.0,
                          "montecarlo.p_un_fraction", "must lie in [0, 1]");
    detail::require_field(!cfg.output.directory.empty(), "output.directory", "must not be empty");
}

inline ExperimentConfig load_experiment(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config", "cannot open file '" + path + "'");
    }
    Json root;
    try {
        root = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("config", std::string("parse error: ") + e.what());
    }
    return parse_experiment(root);
}

/// The built-in experiment: U = 20, G = 10 groups of 100, T = 200, 500 m cell
/// with 35 m exclusion, 20 MHz, -174 dBm/Hz, 10 W, 2 uJ pilots.
inline ExperimentConfig default_experiment() { return ExperimentConfig{}; }

/// Builds the solver inputs for `n_antennas` antennas.
inline ResolvedScenario resolve_scenario(const ScenarioSpec& spec, std::size_t n_antennas)
{
    ResolvedScenario out;
    auto& sys = out.system;
    sys.n_antennas = n_antennas;
    sys.n_unicast = spec.n_unicast;
    sys.n_groups = spec.n_groups;
    sys.group_sizes = spec.group_sizes;
    sys.coherence_symbols = spec.coherence_symbols;
    sys.pilot_length = spec.pilot_length;
    if (spec.unicast_weights) {
        sys.unicast_weights = *spec.unicast_weights;
    }

    double power_scale = 1.0;  // physical -> normalized
    double energy_scale = 1.0;
    if (spec.units == "physical") {
        PhysicalUnits phys;
        phys.bandwidth_hz = spec.bandwidth_hz;
        phys.noise_psd_dbm_per_hz = spec.noise_psd_dbm_per_hz;
        phys.dl_power_watts = spec.total_dl_power;
        phys.pilot_energy_joules = 1.0;
        const auto unit = normalize_units(phys);
        power_scale = unit.total_dl_power / spec.total_dl_power;
        energy_scale = unit.energy_budget;
        out.noise_power_w = spec.bandwidth_hz * dbm_to_watts(spec.noise_psd_dbm_per_hz);
    }
    sys.total_dl_power = spec.total_dl_power * power_scale;
    if (spec.unicast_energy_budgets) {
        for (double e : *spec.unicast_energy_budgets) {
            sys.unicast_energy_budgets.push_back(e * energy_scale);
        }
    } else {
        sys.unicast_energy_budgets.assign(spec.n_unicast, spec.pilot_energy * energy_scale);
    }
    if (spec.multicast_energy_budgets) {
        for (const auto& group : *spec.multicast_energy_budgets) {
            auto& dst = sys.multicast_energy_budgets.emplace_back();
            for (double e : group) {
                dst.push_back(e * energy_scale);
            }
        }
    } else {
        for (auto k : spec.group_sizes) {
            sys.multicast_energy_budgets.emplace_back(k, spec.pilot_energy * energy_scale);
        }
    }

    if (spec.profile) {
        out.profile = *spec.profile;
    } else {
        const auto& g = *spec.geometry;
        CellGeometry geometry;
        if (g.seed) {
            geometry = place_users(sys, g.cell_radius_m, g.exclusion_radius_m, *g.seed);
        } else {
            geometry.unicast_distances = *g.unicast_distances_m;
            geometry.multicast_distances = *g.multicast_distances_m;
            geometry.cell_radius = g.cell_radius_m;
            geometry.exclusion_radius = g.exclusion_radius_m;
        }
        out.profile = large_scale_profile(geometry, {g.pathloss_exponent, g.attenuation});
        out.geometry = std::move(geometry);
    }
    sys.validate();
    out.profile.validate(sys);
    return out;
}

inline Json to_json(const ExperimentConfig& cfg)
{
    const auto& s = cfg.scenario;
    Json scenario = {
        {"n_antennas", s.n_antennas},
        {"n_unicast", s.n_unicast},
        {"n_groups", s.n_groups},
        {"group_sizes", s.group_sizes},
        {"coherence_symbols", s.coherence_symbols},
        {"units", s.units},
        {"total_dl_power", s.total_dl_power},
    };
    if (s.pilot_energy > 0.0) {
        scenario["pilot_energy"] = s.pilot_energy;
    }
    if (s.pilot_length) {
        scenario["pilot_length"] = *s.pilot_length;
    }
    if (s.unicast_weights) {
        scenario["unicast_weights"] = *s.unicast_weights;
    }
    if (s.unicast_energy_budgets) {
        scenario["unicast_energy_budgets"] = *s.unicast_energy_budgets;
    }
    if (s.multicast_energy_budgets) {
        scenario["multicast_energy_budgets"] = *s.multicast_energy_budgets;
    }
    if (s.units == "physical") {
        scenario["bandwidth_hz"] = s.bandwidth_hz;
        scenario["noise_psd_dbm_per_hz"] = s.noise_psd_dbm_per_hz;
    }
    if (s.geometry) {
        const auto& g = *s.geometry;
        Json geo = {{"cell_radius_m", g.cell_radius_m},
                    {"exclusion_radius_m", g.exclusion_radius_m},
                    {"pathloss_exponent", g.pathloss_exponent},
                    {"attenuation", g.attenuation}};
        if (g.seed) {
            geo["seed"] = *g.seed;
        } else {
            geo["unicast_distances_m"] = *g.unicast_distances_m;
            geo["multicast_distances_m"] = *g.multicast_distances_m;
        }
        scenario["geometry"] = geo;
    } else {
        scenario["profile"] = {{"beta", s.profile->beta}, {"eta", s.profile->eta}};
    }
    return Json{
        {"scenario", scenario},
        {"sweep", {{"n_points", cfg.sweep.n_points}, {"n_values", cfg.sweep.n_values}}},
        {"montecarlo",
         {{"n_realizations", cfg.montecarlo.n_realizations},
          {"seed", cfg.montecarlo.seed},
          {"p_un_fraction", cfg.montecarlo.p_un_fraction}}},
        {"output", {{"directory", cfg.output.directory}, {"formats", cfg.output.formats}}},
    };
}

} // namespace jumm
