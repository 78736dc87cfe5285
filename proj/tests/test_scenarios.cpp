// Copyright 2026 The spincat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "spincat/error.hpp"
#include "spincat/scenarios.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace spincat {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json bundled(const std::string& name) {
    return load_json(fs::path(SPINCAT_SCENARIO_DIR) / (name + ".json"));
}

json small_config() {
    return json::parse(R"({
        "scenario_id": "small",
        "engine": "exact",
        "hamiltonian": "separable_jz",
        "probe": {"kind": "noon", "n_atoms": 6},
        "series": [{"label": "coh", "aux": {"kind": "coherent", "beta_sq": 9}},
                   {"label": "sq", "aux": {"kind": "squeezed_coherent", "beta_sq": 9, "r": -0.4}}],
        "sweep": {"parameter": "tau", "start": 0, "stop": 0.5, "count": 9},
        "outputs": ["F_A", "gamma", "C_max"]
    })");
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::InvalidArgument;
}

TEST(ParseScenario, RejectsBadConfigs) {
    json c = small_config();
    c["sweep"] = {{"parameter", "tau"}, {"values", json::array()}};
    EXPECT_EQ(kind_of([&] { parse_scenario(c); }), ErrorKind::ConfigError);
    c = small_config();
    c["sweep"] = {{"parameter", "tau"}, {"values", {0.0, 0.2, 0.1}}};
    EXPECT_EQ(kind_of([&] { parse_scenario(c); }), ErrorKind::ConfigError);
    c = small_config();
    c["colour"] = "red";
    EXPECT_EQ(kind_of([&] { parse_scenario(c); }), ErrorKind::ConfigError);
    c = small_config();
    c["engine"] = "analytic";
    c["probe"] = {{"kind", "css"}, {"n_atoms", 6}, {"theta", 1.0}};
    EXPECT_EQ(kind_of([&] { parse_scenario(c); }), ErrorKind::ConfigError);
    c = small_config();
    c["hamiltonian"] = "beam_splitter";
    EXPECT_EQ(kind_of([&] { parse_scenario(c); }), ErrorKind::ConfigError);  // C_max is J_z only
    c = small_config();
    c["outputs"] = {"N_B_TFS"};
    EXPECT_EQ(kind_of([&] { parse_scenario(c); }), ErrorKind::ConfigError);
    EXPECT_NO_THROW(parse_scenario(small_config()));
}

TEST(ParseScenario, BundledScenariosValidate) {
    for (const char* name : {"fig2_varyt", "fig3_varyfb", "fig4_favst", "fig5_cases", "fig6_sc", "fig7_nbvsna"}) {
        EXPECT_NO_THROW(parse_scenarios(bundled(name))) << name;
    }
}

TEST(Overrides, DottedPathsAndJsonValues) {
    json c = small_config();
    apply_override(c, "probe.n_atoms=8");
    apply_override(c, "numerics.grid_points=401");
    apply_override(c, "series.1.aux.r=0.2");
    EXPECT_EQ(c["probe"]["n_atoms"], 8);
    EXPECT_EQ(c["numerics"]["grid_points"], 401);
    EXPECT_DOUBLE_EQ(c["series"][1]["aux"]["r"].get<double>(), 0.2);
    EXPECT_THROW(apply_override(c, "no_equals_sign"), Error);
}

TEST(ConfigHash, ChangesWithAnyField) {
    const json a = small_config();
    json b = a;
    b["sweep"]["count"] = 10;
    EXPECT_NE(config_hash(a), config_hash(b));
    EXPECT_EQ(config_hash(a), config_hash(json::parse(a.dump(2))));
    EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(FormatDouble, RoundTrips) {
    for (double v : {0.0, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5, 400.0}) {
        EXPECT_EQ(std::stod(format_double(v)), v);
    }
    EXPECT_EQ(format_double(400.0), "400");
}

TEST(RunScenario, TableShapeAndDiagnostics) {
    const ResultTable t = run_scenario(parse_scenario(small_config()), 1);
    EXPECT_EQ(t.sweep.size(), 9u);
    for (const auto& col : t.diagnostics) EXPECT_EQ(col.values.size(), 9u) << col.name;
    const std::string csv = csv_text(t, Metric::F_A);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 10);
    EXPECT_EQ(csv.find("tau,F_A[coh],F_A[sq],n_cut[coh]"), 0u);
    EXPECT_EQ(csv.find('\r'), std::string::npos);
    EXPECT_TRUE(t.metadata.contains("config_hash"));
    EXPECT_EQ(t.metadata["software"]["name"], "spincat");
    EXPECT_TRUE(t.metadata["software"].contains("eigen"));
    const auto& names = t.diagnostics;
    for (const char* needed : {"leakage[coh]", "discarded_pair_weight[coh]", "n_cut[sq]"}) {
        EXPECT_TRUE(std::any_of(names.begin(), names.end(), [&](const Column& c) { return c.name == needed; })) << needed;
    }
}

TEST(RunScenario, DeterministicAcrossThreadCounts) {
    const ScenarioConfig c = parse_scenario(small_config());
    const ResultTable one = run_scenario(c, 1);
    const ResultTable four = run_scenario(c, 4);
    for (Metric m : c.outputs) EXPECT_EQ(csv_text(one, m), csv_text(four, m));
}

TEST(RunScenario, CutoffCeilingIsResourceCeiling) {
    json c = small_config();
    c["numerics"] = {{"max_cutoff", 20}};
    EXPECT_EQ(kind_of([&] { run_scenario(parse_scenario(c), 1); }), ErrorKind::ResourceCeiling);
}

// Fig. 2(c): the Fock curve stays at N^2 while the others decay, phase
// squeezing fastest.
TEST(RunScenario, Fig2QualitativeStructure) {
    const auto panels = parse_scenarios(bundled("fig2_varyt"));
    const auto noon = std::find_if(panels.begin(), panels.end(), [](const ScenarioConfig& c) { return c.panel == "noon"; });
    ASSERT_NE(noon, panels.end());
    const ResultTable t = run_scenario(*noon);
    const auto& cols = t.columns(Metric::F_A);
    ASSERT_EQ(cols.size(), 4u);
    for (double v : cols[3].values) EXPECT_NEAR(v, 400.0, 1e-9);
    const std::size_t k = 1;  // first step after tau = 0
    EXPECT_LT(cols[0].values[k], 400.0 * 0.9);
    EXPECT_LT(cols[1].values[k], 400.0 * 0.99);
    EXPECT_LT(cols[2].values[k], cols[0].values[k]);
    EXPECT_LT(cols[0].values[k], cols[1].values[k]);
}

TEST(RunScenario, Fig7SlopesNearTwo) {
    const auto panels = parse_scenarios(bundled("fig7_nbvsna"));
    const ResultTable t = run_scenario(panels.at(0));
    ASSERT_TRUE(t.metadata.contains("loglog_slope"));
    ASSERT_EQ(t.metadata["loglog_slope"].size(), 3u);
    for (const auto& [name, slope] : t.metadata["loglog_slope"].items()) EXPECT_NEAR(slope.get<double>(), 2.0, 0.15) << name;
}

TEST(CompareEngines, IdenticalAndIncompatible) {
    const ScenarioConfig c = parse_scenario(small_config());
    const DiscrepancyReport same = compare_engines(c, c, 0.0, 1);
    EXPECT_EQ(same.max_rel, 0.0);
    EXPECT_TRUE(same.within_tolerance);
    json other = small_config();
    other["probe"]["n_atoms"] = 8;
    EXPECT_EQ(kind_of([&] { compare_engines(c, parse_scenario(other), 0.1, 1); }), ErrorKind::IncompatibleConfigs);
}

TEST(CompareEngines, ExactAgainstAnalyticOverFirstRevival) {
    json base = small_config();
    base["probe"]["n_atoms"] = 20;
    base["series"] = json::parse(R"([{"label": "coh", "aux": {"kind": "coherent", "beta_sq": 100}}])");
    base["sweep"] = {{"parameter", "tau"}, {"start", 0.0}, {"stop", 2.0 * 3.141592653589793 / 20.0}, {"count", 41}};
    json analytic = base;
    analytic["engine"] = "analytic";
    const DiscrepancyReport r = compare_engines(parse_scenario(base), parse_scenario(analytic), 0.02, 1);
    EXPECT_TRUE(r.within_tolerance) << r.max_rel;
}

TEST(EmitOutputs, FilesAreWrittenAndStable) {
    const fs::path dir = fs::temp_directory_path() / "spincat_emit_test";
    fs::remove_all(dir);
    const ResultTable t = run_scenario(parse_scenario(small_config()), 2);
    const auto paths = emit_outputs(t, dir);
    EXPECT_EQ(paths.size(), 5u);  // three CSVs, plot script, metadata
    const std::string first = slurp(dir / "small_F_A.csv");
    emit_outputs(run_scenario(parse_scenario(small_config()), 1), dir);
    EXPECT_EQ(slurp(dir / "small_F_A.csv"), first);
    const std::string gp = slurp(dir / "small.gp");
    EXPECT_NE(gp.find("small_F_A.csv"), std::string::npos);
    const json meta = load_json(dir / "small.json");
    EXPECT_EQ(meta["config_hash"], config_hash(small_config()));
    fs::remove_all(dir);
}

TEST(LoglogSlope, ExactPowerLaw) {
    EXPECT_NEAR(loglog_slope({1, 2, 4, 8}, {3, 12, 48, 192}), 2.0, 1e-12);
}

}  // namespace
}  // namespace spincat
