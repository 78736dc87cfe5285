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

// spincat: command-line front end for the scenario runner.
//
//   spincat run <config> [--out DIR] [--set a.b=v ...] [--panel ID] [--threads N]
//   spincat compare <configA> <configB> [--tol X] [--set a.b=v ...]
//                   [--set-a a.b=v ...] [--set-b a.b=v ...] [--panel ID]
//   spincat list-scenarios
//   spincat validate <config> [--set a.b=v ...] [--panel ID]
//
// Exit codes: 0 success, 1 other failure, 2 config error, 3 compare tolerance
// exceeded, 4 resource ceiling.

#include "spincat/error.hpp"
#include "spincat/scenarios.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kOther = 1;
constexpr int kConfig = 2;
constexpr int kTolerance = 3;
constexpr int kCeiling = 4;

fs::path scenario_dir() {
    if (const char* env = std::getenv("SPINCAT_SCENARIO_DIR")) return env;
#ifdef SPINCAT_SCENARIO_DIR
    return SPINCAT_SCENARIO_DIR;
#else
    return "scenarios";
#endif
}

// A bare scenario name resolves against the bundled directory.
fs::path resolve_config(const std::string& name) {
    const fs::path direct(name);
    if (fs::exists(direct)) return direct;
    const fs::path bundled = scenario_dir() / (name + ".json");
    if (fs::exists(bundled)) return bundled;
    return direct;
}

std::vector<spincat::ScenarioConfig> load(const std::string& name, const std::vector<std::string>& overrides,
                                          const std::string& panel, const std::vector<std::string>& extra = {}) {
    nlohmann::json doc = spincat::load_json(resolve_config(name));
    for (const auto& o : overrides) spincat::apply_override(doc, o);
    for (const auto& o : extra) spincat::apply_override(doc, o);
    if (!panel.empty()) {
        // Select before parsing so other panels need not validate under the overrides.
        nlohmann::json chosen = nlohmann::json::array();
        if (doc.contains("panels") && doc["panels"].is_array()) {
            for (const auto& p : doc["panels"]) {
                if (p.is_object() && p.value("panel", "") == panel) chosen.push_back(p);
            }
        }
        if (chosen.empty()) throw spincat::Error(spincat::ErrorKind::ConfigError, "no panel named '" + panel + "'");
        doc["panels"] = chosen;
    }
    return spincat::parse_scenarios(doc);
}

int exit_code(const spincat::Error& e) {
    switch (e.kind()) {
        case spincat::ErrorKind::ConfigError:
        case spincat::ErrorKind::IncompatibleConfigs:
            return kConfig;
        case spincat::ErrorKind::ResourceCeiling:
            return kCeiling;
        default:
            return kOther;
    }
}

int cmd_run(const std::string& config, const std::string& out, const std::vector<std::string>& overrides,
            const std::string& panel, int threads) {
    fs::path dir = out;
    if (dir.empty()) {
        const char* env = std::getenv("SPINCAT_OUT_DIR");
        dir = env ? env : "out";
    }
    for (const auto& scenario : load(config, overrides, panel)) {
        const spincat::ResultTable table = spincat::run_scenario(scenario, threads);
        for (const auto& path : spincat::emit_outputs(table, dir)) std::cout << path.string() << "\n";
        if (table.metadata.contains("loglog_slope")) {
            for (const auto& [name, slope] : table.metadata["loglog_slope"].items()) {
                std::cout << "slope " << name << " " << slope.get<double>() << "\n";
            }
        }
    }
    return kOk;
}

int cmd_compare(const std::string& a, const std::string& b, double tol, const std::vector<std::string>& overrides,
                const std::vector<std::string>& set_a, const std::vector<std::string>& set_b, const std::string& panel,
                int threads) {
    const auto left = load(a, overrides, panel, set_a);
    const auto right = load(b, overrides, panel, set_b);
    if (left.size() != right.size()) {
        std::cerr << "error: the configs have different panels\n";
        return kConfig;
    }
    bool ok = true;
    for (std::size_t p = 0; p < left.size(); ++p) {
        const auto report = spincat::compare_engines(left[p], right[p], tol, threads);
        const std::string name = left[p].panel.empty() ? left[p].scenario_id : left[p].scenario_id + "/" + left[p].panel;
        std::cout << name << ": " << spincat::to_string(left[p].engine) << " vs " << spincat::to_string(right[p].engine) << "\n";
        for (const auto& e : report.entries) {
            std::printf("  %-8s %-24s max_abs %.6g  max_rel %.6g  mean_rel %.6g\n", e.metric.c_str(), e.series.c_str(),
                        e.max_abs, e.max_rel, e.mean_rel);
        }
        std::printf("  max relative difference %.6g (tolerance %.6g): %s\n", report.max_rel, tol,
                    report.within_tolerance ? "ok" : "exceeded");
        ok = ok && report.within_tolerance;
    }
    return ok ? kOk : kTolerance;
}

int cmd_list() {
    const fs::path dir = scenario_dir();
    if (!fs::is_directory(dir)) {
        std::cerr << "error: scenario directory " << dir << " not found\n";
        return kOther;
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        const nlohmann::json doc = spincat::load_json(f);
        std::cout << f.stem().string() << "\t" << doc.value("description", "") << "\n";
    }
    return kOk;
}

int cmd_validate(const std::string& config, const std::vector<std::string>& overrides, const std::string& panel) {
    for (const auto& s : load(config, overrides, panel)) {
        std::cout << "ok " << s.scenario_id << (s.panel.empty() ? "" : "/" + s.panel) << " (" << s.sweep.values.size()
                  << " points x " << s.series.size() << " series, engine " << spincat::to_string(s.engine) << ")\n";
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spincat: probe decoherence from a quantized auxiliary field"};
    app.require_subcommand(1);

    std::string config;
    std::string config_b;
    std::string out;
    std::vector<std::string> overrides;
    std::vector<std::string> set_a;
    std::vector<std::string> set_b;
    std::string panel;
    double tol = 0.02;
    int threads = 0;

    auto* run = app.add_subcommand("run", "run a scenario and write CSV, plot script and metadata");
    run->add_option("config", config, "config file or bundled scenario name")->required();
    run->add_option("--out", out, "output directory (default $SPINCAT_OUT_DIR or ./out)");
    run->add_option("--set", overrides, "override a config field, e.g. numerics.grid_points=401");
    run->add_option("--panel", panel, "run only this panel");
    run->add_option("--threads", threads, "worker threads (default $SPINCAT_THREADS or all cores)");

    auto* compare = app.add_subcommand("compare", "run two configs that differ only in engine and report discrepancies");
    compare->add_option("configA", config, "first config")->required();
    compare->add_option("configB", config_b, "second config")->required();
    compare->add_option("--tol", tol, "maximum allowed relative difference");
    compare->add_option("--set", overrides, "override applied to both configs");
    compare->add_option("--set-a", set_a, "override applied to the first config only");
    compare->add_option("--set-b", set_b, "override applied to the second config only");
    compare->add_option("--panel", panel, "compare only this panel");
    compare->add_option("--threads", threads, "worker threads");

    auto* list = app.add_subcommand("list-scenarios", "list bundled scenarios");

    auto* validate = app.add_subcommand("validate", "parse and validate a config without running it");
    validate->add_option("config", config, "config file or bundled scenario name")->required();
    validate->add_option("--set", overrides, "override a config field");
    validate->add_option("--panel", panel, "validate only this panel");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*run) return cmd_run(config, out, overrides, panel, threads);
        if (*compare) return cmd_compare(config, config_b, tol, overrides, set_a, set_b, panel, threads);
        if (*list) return cmd_list();
        if (*validate) return cmd_validate(config, overrides, panel);
    } catch (const spincat::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kOther;
    }
    return kOther;
}
