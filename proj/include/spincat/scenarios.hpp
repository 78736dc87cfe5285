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

// scenarios.hpp: declarative parameter sweeps over the exact, analytic and
// semiclassical engines.
//
// A scenario is a JSON document. Each sweep point is evaluated for every
// series (one auxiliary state, optionally a different probe or Hamiltonian),
// and the results are collected into a ResultTable ordered by sweep index.
// A document may carry "panels": each panel is merged over the base document
// and run as its own table.

#pragma once

#include "spincat/bosonic_mode.hpp"
#include "spincat/composite_evolution.hpp"
#include "spincat/metrology.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace spincat {

enum class Engine { exact, analytic, semiclassical };

Engine parse_engine(std::string_view name);
std::string_view to_string(Engine engine);

enum class Metric { F_A, gamma, C_max, N_B_TFS };

Metric parse_metric(std::string_view name);
std::string_view to_string(Metric metric);

struct ProbeSpec {
    std::string kind = "noon";  // noon, twin_fock, oat_cat, css, spin_cat
    int n_atoms = 20;
    double theta = 0.0;
    double phi = 0.0;
    double rel_phase = 0.0;
};

PureState make_probe(const ProbeSpec& spec);

struct SeriesSpec {
    std::string label;
    AuxStateSpec aux;
    std::optional<ProbeSpec> probe;
    std::optional<HamiltonianKind> hamiltonian;
};

struct SweepSpec {
    std::string parameter;  // tau, theta, phi, beta_sq, r, n_atoms
    std::vector<double> values;
};

struct NumericsSpec {
    double leakage_tolerance = 1e-10;
    int grid_points = 201;
    double span_sigmas = 6.0;
    double qfi_threshold = 1e-12;
    int max_cutoff = 4096;
    long max_dimension = 2'000'000;
    bool neglect_initial_dephasing = false;
    NbTfsRegime nb_tfs_regime = NbTfsRegime::jycat_bs;
    double nb_tfs_angle = 1.5707963267948966;
    int exact_max_atoms = 24;
};

struct ScenarioConfig {
    std::string scenario_id;
    std::string panel;
    std::string description;
    Engine engine = Engine::exact;
    HamiltonianKind hamiltonian = HamiltonianKind::separable_jz;
    ProbeSpec probe;
    CartesianAxis generator = CartesianAxis::z;
    CartesianAxis rotation_axis = CartesianAxis::x;
    std::vector<SeriesSpec> series;
    SweepSpec sweep;
    std::optional<double> fixed_tau;
    std::optional<double> fixed_theta;
    std::optional<double> fixed_phi;
    std::vector<Metric> outputs;
    NumericsSpec numerics;
    nlohmann::json source;  // the document this config was parsed from
};

/// Parses a document into one config per panel (one if there are no panels).
/// Throws ConfigError on any schema or consistency problem.
std::vector<ScenarioConfig> parse_scenarios(const nlohmann::json& document);
ScenarioConfig parse_scenario(const nlohmann::json& document);

nlohmann::json load_json(const std::filesystem::path& path);

/// Applies "a.b.c=value" overrides; the value is read as JSON when it parses,
/// otherwise as a string.
void apply_override(nlohmann::json& document, const std::string& assignment);

/// Canonical text of a document (sorted keys, no whitespace).
std::string canonical_text(const nlohmann::json& document);
/// 64-bit FNV-1a of the canonical text, as 16 hex digits.
std::string config_hash(const nlohmann::json& document);

struct Column {
    std::string name;
    std::vector<double> values;
};

struct ResultTable {
    std::string scenario_id;
    std::string panel;
    std::string sweep_name;
    std::vector<double> sweep;
    std::vector<Metric> metrics;
    std::vector<std::vector<Column>> metric_columns;  // parallel to metrics, one column per series
    std::vector<Column> diagnostics;
    nlohmann::json metadata;

    std::string stem() const;
    const std::vector<Column>& columns(Metric metric) const;
};

/// Evaluates every (sweep point, series) pair. Tasks run on `threads` workers
/// (0 reads SPINCAT_THREADS, falling back to the hardware concurrency); the
/// output does not depend on the worker count.
ResultTable run_scenario(const ScenarioConfig& config, int threads = 0);

struct EngineDiscrepancy {
    std::string metric;
    std::string series;
    double max_abs = 0.0;
    double max_rel = 0.0;
    double mean_rel = 0.0;
    std::vector<double> abs_diff;
    std::vector<double> rel_diff;
};

struct DiscrepancyReport {
    std::vector<EngineDiscrepancy> entries;
    double max_rel = 0.0;
    double tolerance = 0.0;
    bool within_tolerance = true;
};

/// Both configs must agree in everything except the engine. Relative
/// differences use max(|a|, |b|, 1e-6 * column maximum) as the denominator.
DiscrepancyReport compare_engines(const ScenarioConfig& a, const ScenarioConfig& b, double tolerance, int threads = 0);

/// Writes <stem>_<metric>.csv for every metric, <stem>.gp and <stem>.json.
/// Returns the written paths.
std::vector<std::filesystem::path> emit_outputs(const ResultTable& table, const std::filesystem::path& dir);

/// CSV text for one metric (exposed for tests).
std::string csv_text(const ResultTable& table, Metric metric);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace spincat
