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
#include <sstream>

#include "jumm/cli.hpp"
#include "jumm/experiment.hpp"
#include "jumm/output.hpp"
#include "support.hpp"

namespace jumm {
namespace {

namespace fs = std::filesystem;
using testing::read_file;
using testing::scratch_dir;

Json default_cell_json()
{
    return to_json(default_experiment());
}

fs::path write_config(const fs::path& dir, const Json& j)
{
    const auto path = dir / "config.json";
    write_text_file(path, j.dump(2));
    return path;
}

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(Command c, RunOptions opt)
{
    std::ostringstream out;
    std::ostringstream err;
    const int code = run(c, opt, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> data_lines(const std::string& text)
{
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line[0] != '#') {
            lines.push_back(line);
        }
    }
    return lines;
}

TEST(Experiment, DefaultReproducesReferenceCell)
{
    const auto cfg = default_experiment();
    EXPECT_NO_THROW(validate_experiment(cfg));
    const auto cell = resolve_scenario(cfg.scenario, 100);
    EXPECT_EQ(cell.system.n_unicast, 20u);
    EXPECT_EQ(cell.system.n_groups, 10u);
    EXPECT_EQ(cell.system.n_multicast_users(), 1000u);
    EXPECT_EQ(cell.system.coherence_symbols, 200u);
    EXPECT_NEAR(cell.system.total_dl_power / 125594321575479.0055, 1.0, 1e-13);
    EXPECT_NEAR(cell.system.unicast_energy_budgets[3] / 502377286301916.0222, 1.0, 1e-13);
    ASSERT_TRUE(cell.geometry.has_value());
    for (double d : cell.geometry->unicast_distances) {
        EXPECT_GE(d, 35.0);
        EXPECT_LE(d, 500.0);
    }
    EXPECT_EQ(cfg.sweep.n_points, 21u);
    EXPECT_EQ(cfg.sweep.n_values, (std::vector<std::size_t>{50, 100, 200}));
}

TEST(Experiment, JsonRoundTrip)
{
    const auto j = default_cell_json();
    EXPECT_EQ(to_json(parse_experiment(j)).dump(), j.dump());
}

TEST(Experiment, MissingTotalPowerNamesField)
{
    auto j = default_cell_json();
    j["scenario"].erase("total_dl_power");
    try {
        parse_experiment(j);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.field(), "scenario.total_dl_power");
    }
}

TEST(Experiment, RejectsUnknownKeys)
{
    auto j = default_cell_json();
    j["scenario"]["antennas"] = 3;
    EXPECT_THROW(parse_experiment(j), ConfigError);
    j = default_cell_json();
    j["extra"] = true;
    EXPECT_THROW(parse_experiment(j), ConfigError);
    j = default_cell_json();
    j["scenario"]["geometry"]["radius"] = 3;
    EXPECT_THROW(parse_experiment(j), ConfigError);
}

TEST(Experiment, RejectsBadValues)
{
    auto j = default_cell_json();
    j["scenario"]["n_unicast"] = -2;
    EXPECT_THROW(parse_experiment(j), ConfigError);
    j = default_cell_json();
    j["scenario"]["units"] = "furlongs";
    EXPECT_THROW(parse_experiment(j), ConfigError);
    j = default_cell_json();
    j["scenario"]["group_sizes"] = {1, 2};
    EXPECT_THROW(parse_experiment(j), ConfigError);
    j = default_cell_json();
    j["scenario"]["profile"] = {{"beta", {1.0}}, {"eta", {{1.0}}}};
    EXPECT_THROW(parse_experiment(j), ConfigError);
    j = default_cell_json();
    j["sweep"]["n_values"] = Json::array();
    EXPECT_THROW(validate_experiment(parse_experiment(j)), ConfigError);
    j = default_cell_json();
    j["sweep"]["n_values"] = {50, 50};
    EXPECT_THROW(validate_experiment(parse_experiment(j)), ConfigError);
    j = default_cell_json();
    j["output"]["formats"] = {"xlsx"};
    EXPECT_THROW(parse_experiment(j), ConfigError);
}

TEST(Experiment, ExplicitDistancesNeedNoSeed)
{
    auto j = default_cell_json();
    auto& s = j["scenario"];
    s["n_unicast"] = 2;
    s["n_groups"] = 1;
    s["group_sizes"] = {2};
    s["geometry"].erase("seed");
    s["geometry"]["unicast_distances_m"] = {40.0, 300.0};
    s["geometry"]["multicast_distances_m"] = {{100.0, 499.0}};
    const auto cell = resolve_scenario(parse_experiment(j).scenario, 8);
    EXPECT_DOUBLE_EQ(cell.profile.beta[1], large_scale_fading(300.0));
    EXPECT_DOUBLE_EQ(cell.profile.eta[0][1], large_scale_fading(499.0));
}

TEST(Run, MissingTotalPowerExitsBeforeWriting)
{
    const auto dir = scratch_dir("missing_power");
    auto j = default_cell_json();
    j["scenario"].erase("total_dl_power");
    RunOptions opt;
    opt.config_path = write_config(dir, j).string();
    opt.out_dir = (dir / "out").string();
    const auto r = invoke(Command::pareto, opt);
    EXPECT_EQ(r.code, kExitConfig);
    const auto err = Json::parse(r.err);
    EXPECT_EQ(err["error"]["kind"], "config");
    EXPECT_EQ(err["error"]["field"], "scenario.total_dl_power");
    EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(Run, MissingConfigFile)
{
    RunOptions opt;
    opt.config_path = "/nonexistent/jumm.json";
    const auto r = invoke(Command::mmf, opt);
    EXPECT_EQ(r.code, kExitConfig);
    EXPECT_TRUE(Json::parse(r.err).contains("error"));
}

TEST(Run, EmptyAntennaListWritesNothing)
{
    const auto dir = scratch_dir("empty_n");
    auto j = default_cell_json();
    j["sweep"]["n_values"] = Json::array();
    RunOptions opt;
    opt.config_path = write_config(dir, j).string();
    opt.out_dir = (dir / "out").string();
    EXPECT_EQ(invoke(Command::pareto, opt).code, kExitConfig);
    EXPECT_FALSE(fs::exists(dir / "out"));
    EXPECT_THROW(emit_plotdata({}, Json::object()), InvalidArgument);
}

TEST(Run, ParetoDefaultCellConfig)
{
    const auto dir = scratch_dir("pareto");
    RunOptions opt;
    opt.out_dir = dir.string();
    const auto r = invoke(Command::pareto, opt);
    ASSERT_EQ(r.code, kExitOk) << r.err;

    const auto csv = read_file(dir / "pareto.csv");
    ASSERT_EQ(csv.rfind("# provenance: ", 0), 0u);
    const auto rows = data_lines(csv);
    ASSERT_EQ(rows.size(), 64u);
    EXPECT_EQ(rows[0], "N,p_un,p_mu,o_mu,o_un");
    EXPECT_EQ(rows[1].rfind("50,", 0), 0u);
    EXPECT_EQ(rows[63].rfind("200,", 0), 0u);

    const auto convexity = Json::parse(read_file(dir / "convexity.json"));
    EXPECT_TRUE(convexity["all_consistent"].get<bool>());
    EXPECT_EQ(convexity["sweeps"].size(), 3u);
    EXPECT_EQ(convexity["provenance"]["config"]["scenario"]["geometry"]["seed"], 1);

    const auto plot = read_file(dir / "pareto_plot.dat");
    EXPECT_EQ(data_lines(plot).size(), 3u * 21u + 3u * 3u);
}

TEST(Run, PlotdataSeriesDominateAcrossAntennaCounts)
{
    const auto cfg = default_experiment();
    std::vector<SweepResult> sweeps;
    for (auto n : cfg.sweep.n_values) {
        const auto cell = resolve_scenario(cfg.scenario, n);
        sweeps.push_back({n, pareto_sweep(cell.system, cell.profile, 21), {}});
    }
    for (std::size_t s = 1; s < sweeps.size(); ++s) {
        for (std::size_t i = 0; i < 21; ++i) {
            EXPECT_GE(sweeps[s].points[i].o_mu, sweeps[s - 1].points[i].o_mu);
            EXPECT_GE(sweeps[s].points[i].o_un, sweeps[s - 1].points[i].o_un);
        }
    }
    const auto text = emit_plotdata(sweeps, Json::object());
    std::size_t series = 0;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        series += line.rfind("# series", 0) == 0;
    }
    EXPECT_EQ(series, 3u);
}

TEST(Run, OutputsAreByteIdentical)
{
    const auto a = scratch_dir("det_a");
    const auto b = scratch_dir("det_b");
    RunOptions opt;
    opt.config_path = (fs::path(JUMM_SOURCE_DIR) / "configs" / "small_validate.json").string();
    opt.out_dir = a.string();
    opt.threads = 1;
    ASSERT_EQ(invoke(Command::pareto, opt).code, kExitOk);
    ASSERT_EQ(invoke(Command::validate, opt).code, kExitOk);
    opt.out_dir = b.string();
    opt.threads = 4;
    ASSERT_EQ(invoke(Command::pareto, opt).code, kExitOk);
    ASSERT_EQ(invoke(Command::validate, opt).code, kExitOk);
    // Provenance records the output directory, so compare with it normalized.
    for (const char* name : {"pareto.csv", "pareto_plot.dat", "convexity.json", "montecarlo.json"}) {
        auto x = read_file(a / name);
        auto y = read_file(b / name);
        ASSERT_FALSE(x.empty());
        for (auto* s : {&x, &y}) {
            for (const auto& d : {a.string(), b.string()}) {
                for (auto pos = s->find(d); pos != std::string::npos; pos = s->find(d)) {
                    s->replace(pos, d.size(), "<out>");
                }
            }
        }
        EXPECT_EQ(x, y) << name;
    }
}

TEST(Run, MmfAtZeroUnicastPower)
{
    const auto dir = scratch_dir("mmf");
    RunOptions opt;
    opt.out_dir = dir.string();
    opt.p_un = 0.0;
    ASSERT_EQ(invoke(Command::mmf, opt).code, kExitOk);
    const auto doc = Json::parse(read_file(dir / "mmf.json"));

    const auto cell = resolve_scenario(default_experiment().scenario, 100);
    const auto& sys = cell.system;
    const double p = sys.total_dl_power;
    double inverse = 0.0;
    double members = 0.0;
    for (std::size_t g = 0; g < sys.n_groups; ++g) {
        double upsilon = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < sys.group_sizes[g]; ++k) {
            const double eta = cell.profile.eta[g][k];
            upsilon = std::min(upsilon, sys.multicast_energy_budgets[g][k] * eta * eta / (1.0 + eta * p));
            inverse += 1.0 / eta;
            members += 1.0;
        }
        inverse += 1.0 / upsilon;
    }
    const double gamma = 100.0 * p / (p * members + inverse);
    const double expected = (1.0 - 30.0 / 200.0) * std::log2(1.0 + gamma);
    EXPECT_NEAR(doc["solution"]["objective"].get<double>(), expected, 1e-12 * expected);
    EXPECT_TRUE(doc["provenance"].contains("normalized"));
}

TEST(Run, InfeasibleSplit)
{
    const auto dir = scratch_dir("infeasible");
    RunOptions opt;
    opt.out_dir = (dir / "out").string();
    opt.p_un = 2e14;
    const auto r = invoke(Command::mmf, opt);
    EXPECT_EQ(r.code, kExitInfeasible);
    const auto err = Json::parse(r.err);
    EXPECT_EQ(err["error"]["kind"], "infeasible");
    EXPECT_NE(err["error"]["message"].get<std::string>().find("P_un + P_mu <= P"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir / "out"));

    opt.p_un = 1e14;
    opt.p_mu = 1e14;
    EXPECT_EQ(invoke(Command::wsse, opt).code, kExitInfeasible);
}

TEST(Run, WsseWritesSolution)
{
    const auto dir = scratch_dir("wsse");
    RunOptions opt;
    opt.out_dir = dir.string();
    opt.n_antennas = 64;
    ASSERT_EQ(invoke(Command::wsse, opt).code, kExitOk);
    const auto doc = Json::parse(read_file(dir / "wsse.json"));
    EXPECT_EQ(doc["solution"]["p_dl"].size(), 20u);
    EXPECT_EQ(doc["provenance"]["config"]["scenario"]["n_antennas"], 64);
    EXPECT_GT(doc["solution"]["objective"].get<double>(), 0.0);
}

TEST(Run, OracleCheckPasses)
{
    const auto dir = scratch_dir("oracle");
    RunOptions opt;
    opt.out_dir = dir.string();
    const auto r = invoke(Command::oracle_check, opt);
    EXPECT_EQ(r.code, kExitOk) << r.out;
    const auto doc = Json::parse(read_file(dir / "oracle_check.json"));
    EXPECT_TRUE(doc["all_pass"].get<bool>());
}

TEST(Run, CommandNames)
{
    for (auto c : {Command::pareto, Command::mmf, Command::wsse, Command::validate, Command::oracle_check}) {
        EXPECT_EQ(parse_command(command_name(c)), c);
    }
    EXPECT_FALSE(parse_command("plot").has_value());
}

} // namespace
} // namespace jumm
