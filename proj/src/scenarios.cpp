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

#include "spincat/scenarios.hpp"

#include "spincat/error.hpp"
#include "spincat/semiclassical.hpp"
#include "spincat/spin_algebra.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

namespace spincat {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr const char* kVersion = "1.0.0";

void config_require(bool condition, const std::string& message) {
    if (!condition) fail(ErrorKind::ConfigError, message);
}

void check_keys(const json& object, const std::set<std::string>& allowed, const std::string& where) {
    config_require(object.is_object(), where + " must be an object");
    for (const auto& [key, value] : object.items()) {
        config_require(allowed.count(key) > 0, "unknown key '" + key + "' in " + where);
    }
}

double get_number(const json& object, const std::string& key, const std::string& where) {
    config_require(object.contains(key), "missing '" + key + "' in " + where);
    config_require(object.at(key).is_number(), "'" + key + "' in " + where + " must be a number");
    const double value = object.at(key).get<double>();
    config_require(std::isfinite(value), "'" + key + "' in " + where + " must be finite");
    return value;
}

double get_number_or(const json& object, const std::string& key, double fallback, const std::string& where) {
    return object.contains(key) ? get_number(object, key, where) : fallback;
}

int get_int(const json& object, const std::string& key, const std::string& where) {
    config_require(object.contains(key), "missing '" + key + "' in " + where);
    config_require(object.at(key).is_number_integer(), "'" + key + "' in " + where + " must be an integer");
    return object.at(key).get<int>();
}

std::string get_string(const json& object, const std::string& key, const std::string& where) {
    config_require(object.contains(key), "missing '" + key + "' in " + where);
    config_require(object.at(key).is_string(), "'" + key + "' in " + where + " must be a string");
    return object.at(key).get<std::string>();
}

template <class F>
auto translate(F&& parse, const std::string& where) {
    try {
        return parse();
    } catch (const Error& e) {
        fail(ErrorKind::ConfigError, where + ": " + e.what());
    }
}

ProbeSpec parse_probe(const json& object, const std::string& where) {
    check_keys(object, {"kind", "n_atoms", "theta", "phi", "rel_phase"}, where);
    ProbeSpec probe;
    probe.kind = get_string(object, "kind", where);
    config_require(probe.kind == "noon" || probe.kind == "twin_fock" || probe.kind == "oat_cat" || probe.kind == "css" ||
                       probe.kind == "spin_cat",
                   "unknown probe kind '" + probe.kind + "' in " + where);
    probe.n_atoms = get_int(object, "n_atoms", where);
    config_require(probe.n_atoms >= 1, "n_atoms must be positive in " + where);
    probe.theta = get_number_or(object, "theta", 0.0, where);
    probe.phi = get_number_or(object, "phi", 0.0, where);
    probe.rel_phase = get_number_or(object, "rel_phase", 0.0, where);
    return probe;
}

AuxStateSpec parse_aux(const json& object, const std::string& where) {
    check_keys(object, {"kind", "beta_sq", "r", "n"}, where);
    const std::string kind = get_string(object, "kind", where);
    if (kind == "fock") {
        const int n = get_int(object, "n", where);
        config_require(n >= 0, "Fock level must be nonnegative in " + where);
        return AuxStateSpec::fock(n);
    }
    config_require(kind == "coherent" || kind == "squeezed_coherent", "unknown auxiliary kind '" + kind + "' in " + where);
    const double beta_sq = get_number(object, "beta_sq", where);
    config_require(beta_sq >= 0.0, "beta_sq must be nonnegative in " + where);
    const double r = kind == "coherent" ? 0.0 : get_number_or(object, "r", 0.0, where);
    config_require(kind == "squeezed_coherent" || !object.contains("r") || object.at("r") == 0,
                   "a coherent auxiliary takes no squeezing in " + where);
    return AuxStateSpec::squeezed(std::sqrt(beta_sq), r);
}

SweepSpec parse_sweep(const json& object) {
    check_keys(object, {"parameter", "values", "start", "stop", "count", "spacing"}, "sweep");
    SweepSpec sweep;
    sweep.parameter = get_string(object, "parameter", "sweep");
    static const std::set<std::string> parameters{"tau", "theta", "phi", "beta_sq", "r", "n_atoms"};
    config_require(parameters.count(sweep.parameter) > 0, "unknown sweep parameter '" + sweep.parameter + "'");
    if (object.contains("values")) {
        config_require(!object.contains("start") && !object.contains("stop") && !object.contains("count"),
                       "sweep takes either values or start/stop/count");
        config_require(object.at("values").is_array(), "sweep values must be an array");
        for (const auto& v : object.at("values")) {
            config_require(v.is_number() && std::isfinite(v.get<double>()), "sweep values must be finite numbers");
            sweep.values.push_back(v.get<double>());
        }
    } else {
        const double start = get_number(object, "start", "sweep");
        const double stop = get_number(object, "stop", "sweep");
        const int count = get_int(object, "count", "sweep");
        config_require(count >= 1, "sweep count must be positive");
        const std::string spacing = object.contains("spacing") ? get_string(object, "spacing", "sweep") : "linear";
        config_require(spacing == "linear" || spacing == "log", "sweep spacing must be linear or log");
        if (spacing == "log") config_require(start > 0.0 && stop > 0.0, "log spacing needs positive bounds");
        for (int k = 0; k < count; ++k) {
            const double u = count == 1 ? 0.0 : static_cast<double>(k) / (count - 1);
            sweep.values.push_back(spacing == "log" ? start * std::pow(stop / start, u) : start + (stop - start) * u);
        }
    }
    config_require(!sweep.values.empty(), "sweep grid is empty");
    bool increasing = true;
    bool decreasing = true;
    for (std::size_t k = 1; k < sweep.values.size(); ++k) {
        increasing = increasing && sweep.values[k] > sweep.values[k - 1];
        decreasing = decreasing && sweep.values[k] < sweep.values[k - 1];
    }
    config_require(increasing || decreasing, "sweep grid must be strictly monotone");
    if (sweep.parameter == "n_atoms") {
        for (double v : sweep.values) config_require(v >= 1.0 && v == std::floor(v), "n_atoms sweep values must be positive integers");
    }
    if (sweep.parameter == "beta_sq") {
        for (double v : sweep.values) config_require(v >= 0.0, "beta_sq sweep values must be nonnegative");
    }
    return sweep;
}

NumericsSpec parse_numerics(const json& object) {
    check_keys(object, {"leakage_tolerance", "grid_points", "span_sigmas", "qfi_threshold", "max_cutoff", "max_dimension",
                        "neglect_initial_dephasing", "nb_tfs", "exact_max_atoms"},
               "numerics");
    NumericsSpec n;
    n.leakage_tolerance = get_number_or(object, "leakage_tolerance", n.leakage_tolerance, "numerics");
    config_require(n.leakage_tolerance > 0.0 && n.leakage_tolerance <= 1e-3, "leakage_tolerance must lie in (0, 1e-3]");
    if (object.contains("grid_points")) n.grid_points = get_int(object, "grid_points", "numerics");
    config_require(n.grid_points >= 3 && n.grid_points % 2 == 1, "grid_points must be odd and >= 3");
    n.span_sigmas = get_number_or(object, "span_sigmas", n.span_sigmas, "numerics");
    config_require(n.span_sigmas > 0.0, "span_sigmas must be positive");
    n.qfi_threshold = get_number_or(object, "qfi_threshold", n.qfi_threshold, "numerics");
    config_require(n.qfi_threshold > 0.0, "qfi_threshold must be positive");
    if (object.contains("max_cutoff")) n.max_cutoff = get_int(object, "max_cutoff", "numerics");
    config_require(n.max_cutoff >= 2, "max_cutoff must be at least 2");
    if (object.contains("max_dimension")) {
        config_require(object.at("max_dimension").is_number_integer(), "max_dimension must be an integer");
        n.max_dimension = object.at("max_dimension").get<long>();
    }
    config_require(n.max_dimension >= 1, "max_dimension must be positive");
    if (object.contains("neglect_initial_dephasing")) {
        config_require(object.at("neglect_initial_dephasing").is_boolean(), "neglect_initial_dephasing must be a boolean");
        n.neglect_initial_dephasing = object.at("neglect_initial_dephasing").get<bool>();
    }
    if (object.contains("exact_max_atoms")) n.exact_max_atoms = get_int(object, "exact_max_atoms", "numerics");
    if (object.contains("nb_tfs")) {
        const json& tfs = object.at("nb_tfs");
        check_keys(tfs, {"regime", "angle"}, "numerics.nb_tfs");
        if (tfs.contains("regime")) {
            const std::string regime = get_string(tfs, "regime", "numerics.nb_tfs");
            n.nb_tfs_regime = translate([&] { return parse_nb_tfs_regime(regime); }, "numerics.nb_tfs");
        }
        n.nb_tfs_angle = get_number_or(tfs, "angle", n.nb_tfs_angle, "numerics.nb_tfs");
        config_require(n.nb_tfs_angle > 0.0, "nb_tfs angle must be positive");
    }
    return n;
}

HamiltonianKind effective_hamiltonian(const ScenarioConfig& c, const SeriesSpec& s) {
    return s.hamiltonian.value_or(c.hamiltonian);
}

bool has_metric(const ScenarioConfig& c, Metric m) {
    return std::find(c.outputs.begin(), c.outputs.end(), m) != c.outputs.end();
}

bool is_time_parameter(const std::string& p) {
    return p == "tau" || p == "theta" || p == "phi";
}

void validate(const ScenarioConfig& c) {
    const bool needs_time = std::any_of(c.outputs.begin(), c.outputs.end(), [](Metric m) { return m != Metric::N_B_TFS; });
    const int fixed_count = int(c.fixed_tau.has_value()) + int(c.fixed_theta.has_value()) + int(c.fixed_phi.has_value());
    config_require(fixed_count <= 1, "at most one of fixed.tau, fixed.theta, fixed.phi may be given");
    if (is_time_parameter(c.sweep.parameter)) {
        config_require(fixed_count == 0, "a time sweep cannot be combined with a fixed time");
    } else if (needs_time) {
        config_require(fixed_count == 1, "a non-time sweep needs one of fixed.tau, fixed.theta, fixed.phi");
    }
    if (has_metric(c, Metric::N_B_TFS)) {
        config_require(c.sweep.parameter == "n_atoms" || c.sweep.parameter == "r",
                       "N_B_TFS needs an n_atoms or r sweep");
        if (c.numerics.nb_tfs_regime == NbTfsRegime::jycat_bs) {
            config_require(std::abs(c.numerics.nb_tfs_angle - kPi / 2.0) <= 1e-12,
                           "the jycat_bs photon budget is defined for a pi/2 rotation only");
        }
    }
    const std::string time_param = is_time_parameter(c.sweep.parameter) ? c.sweep.parameter
                                   : c.fixed_theta                     ? "theta"
                                   : c.fixed_phi                       ? "phi"
                                                                       : "tau";
    for (const auto& s : c.series) {
        const HamiltonianKind kind = effective_hamiltonian(c, s);
        const std::string where = "series '" + s.label + "'";
        const bool jz = kind == HamiltonianKind::separable_jz ||
                        (kind == HamiltonianKind::classical_rotation && c.rotation_axis == CartesianAxis::z);
        if (needs_time) {
            if (time_param == "theta") config_require(!jz, where + ": theta applies to rotations about x");
            if (time_param == "phi") config_require(jz, where + ": phi applies to rotations about z");
            if (time_param == "theta" || !jz) {
                config_require(s.aux.kind == AuxKind::squeezed_coherent,
                               where + ": converting between theta and tau needs a coherent amplitude");
            }
        }
        if (kind == HamiltonianKind::classical_rotation) {
            config_require(c.rotation_axis != CartesianAxis::y, where + ": rotation axis must be x or z");
        }
        if (has_metric(c, Metric::C_max)) {
            config_require(kind == HamiltonianKind::separable_jz, where + ": C_max is defined for the J_z (x) n_B coupling only");
        }
        if (kind == HamiltonianKind::classical_X_case || kind == HamiltonianKind::classical_Y_case) {
            config_require(c.engine == Engine::exact, where + ": the classical-quadrature cases run on the exact engine only");
        }
        const bool bs_like = kind == HamiltonianKind::beam_splitter || kind == HamiltonianKind::classical_X_case ||
                             kind == HamiltonianKind::classical_Y_case;
        if (bs_like) {
            config_require(s.aux.kind == AuxKind::squeezed_coherent, where + ": the beam splitter needs a squeezed coherent auxiliary");
            if (c.sweep.parameter != "beta_sq") {
                config_require(s.aux.beta.real() > 0.0, where + ": the beam splitter needs beta > 0");
            } else {
                for (double v : c.sweep.values) config_require(v > 0.0, where + ": the beam splitter needs beta > 0");
            }
        }
        if (c.engine == Engine::analytic && kind == HamiltonianKind::separable_jz) {
            const ProbeSpec& p = s.probe.value_or(c.probe);
            config_require(p.kind == "noon" && c.generator == CartesianAxis::z,
                           where + ": the analytic J_z engine covers NOON probes with generator z");
        }
        if (c.engine == Engine::analytic && kind == HamiltonianKind::beam_splitter) {
            config_require(!has_metric(c, Metric::gamma), where + ": the analytic beam-splitter engine gives F_A only");
            if (needs_time) {
                config_require(c.fixed_theta && std::abs(*c.fixed_theta - kPi / 2.0) <= 1e-12,
                               where + ": the analytic beam-splitter engine is defined at fixed theta = pi/2");
            }
        }
        if (c.engine == Engine::semiclassical && kind == HamiltonianKind::beam_splitter) {
            config_require(s.aux.kind == AuxKind::squeezed_coherent, where + ": semiclassical beam splitter needs a coherent amplitude");
        }
    }
}

}  // namespace

Engine parse_engine(std::string_view name) {
    if (name == "exact") return Engine::exact;
    if (name == "analytic") return Engine::analytic;
    if (name == "semiclassical") return Engine::semiclassical;
    fail(ErrorKind::ConfigError, "unknown engine '" + std::string(name) + "'");
}

std::string_view to_string(Engine engine) {
    switch (engine) {
        case Engine::exact: return "exact";
        case Engine::analytic: return "analytic";
        case Engine::semiclassical: return "semiclassical";
    }
    return "?";
}

Metric parse_metric(std::string_view name) {
    if (name == "F_A") return Metric::F_A;
    if (name == "gamma") return Metric::gamma;
    if (name == "C_max") return Metric::C_max;
    if (name == "N_B_TFS") return Metric::N_B_TFS;
    fail(ErrorKind::ConfigError, "unknown output metric '" + std::string(name) + "'");
}

std::string_view to_string(Metric metric) {
    switch (metric) {
        case Metric::F_A: return "F_A";
        case Metric::gamma: return "gamma";
        case Metric::C_max: return "C_max";
        case Metric::N_B_TFS: return "N_B_TFS";
    }
    return "?";
}

PureState make_probe(const ProbeSpec& spec) {
    const SpinBasis basis(spec.n_atoms);
    if (spec.kind == "noon") return named_state(NamedState::noon, basis);
    if (spec.kind == "twin_fock") return named_state(NamedState::twin_fock, basis);
    if (spec.kind == "oat_cat") return named_state(NamedState::oat_cat, basis);
    if (spec.kind == "css") return coherent_spin_state(spec.theta, spec.phi, basis);
    if (spec.kind == "spin_cat") return spin_cat(spec.theta, spec.phi, spec.rel_phase, basis);
    fail(ErrorKind::ConfigError, "unknown probe kind '" + spec.kind + "'");
}

ScenarioConfig parse_scenario(const json& doc) {
    check_keys(doc, {"scenario_id", "panel", "description", "engine", "hamiltonian", "probe", "generator", "rotation_axis",
                     "series", "sweep", "fixed", "outputs", "numerics"},
               "scenario");
    ScenarioConfig c;
    c.source = doc;
    c.scenario_id = get_string(doc, "scenario_id", "scenario");
    config_require(!c.scenario_id.empty(), "scenario_id must be nonempty");
    for (char ch : c.scenario_id) {
        config_require(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-', "scenario_id may use [A-Za-z0-9_-] only");
    }
    if (doc.contains("panel")) c.panel = get_string(doc, "panel", "scenario");
    if (doc.contains("description")) c.description = get_string(doc, "description", "scenario");
    c.engine = parse_engine(get_string(doc, "engine", "scenario"));
    const std::string hamiltonian = get_string(doc, "hamiltonian", "scenario");
    c.hamiltonian = translate([&] { return parse_hamiltonian_kind(hamiltonian); }, "hamiltonian");
    c.probe = parse_probe(doc.contains("probe") ? doc.at("probe") : json(), "probe");
    if (doc.contains("generator")) {
        const std::string axis = get_string(doc, "generator", "scenario");
        c.generator = translate([&] { return parse_cartesian_axis(axis); }, "generator");
    }
    if (doc.contains("rotation_axis")) {
        const std::string axis = get_string(doc, "rotation_axis", "scenario");
        c.rotation_axis = translate([&] { return parse_cartesian_axis(axis); }, "rotation_axis");
    }

    config_require(doc.contains("series") && doc.at("series").is_array() && !doc.at("series").empty(),
                   "series must be a nonempty array");
    std::set<std::string> labels;
    for (const auto& s : doc.at("series")) {
        check_keys(s, {"label", "aux", "probe", "hamiltonian"}, "series entry");
        SeriesSpec series;
        series.label = get_string(s, "label", "series entry");
        config_require(!series.label.empty() && series.label.find_first_of(",\"\n\r[]") == std::string::npos,
                       "series labels must be nonempty and free of , \" [ ] and newlines");
        config_require(labels.insert(series.label).second, "duplicate series label '" + series.label + "'");
        config_require(s.contains("aux"), "missing aux in series '" + series.label + "'");
        series.aux = parse_aux(s.at("aux"), "series '" + series.label + "' aux");
        if (s.contains("probe")) series.probe = parse_probe(s.at("probe"), "series '" + series.label + "' probe");
        if (s.contains("hamiltonian")) {
            const std::string h = get_string(s, "hamiltonian", "series entry");
            series.hamiltonian = translate([&] { return parse_hamiltonian_kind(h); }, "series hamiltonian");
        }
        c.series.push_back(std::move(series));
    }

    config_require(doc.contains("sweep"), "missing sweep");
    c.sweep = parse_sweep(doc.at("sweep"));

    if (doc.contains("fixed")) {
        const json& fixed = doc.at("fixed");
        check_keys(fixed, {"tau", "theta", "phi"}, "fixed");
        if (fixed.contains("tau")) c.fixed_tau = get_number(fixed, "tau", "fixed");
        if (fixed.contains("theta")) c.fixed_theta = get_number(fixed, "theta", "fixed");
        if (fixed.contains("phi")) c.fixed_phi = get_number(fixed, "phi", "fixed");
    }

    config_require(doc.contains("outputs") && doc.at("outputs").is_array() && !doc.at("outputs").empty(),
                   "outputs must be a nonempty array");
    for (const auto& m : doc.at("outputs")) {
        config_require(m.is_string(), "outputs must be metric names");
        const Metric metric = parse_metric(m.get<std::string>());
        config_require(!has_metric(c, metric), "duplicate output metric");
        c.outputs.push_back(metric);
    }
    if (doc.contains("numerics")) c.numerics = parse_numerics(doc.at("numerics"));
    validate(c);
    return c;
}

std::vector<ScenarioConfig> parse_scenarios(const json& document) {
    config_require(document.is_object(), "a scenario document must be a JSON object");
    if (!document.contains("panels")) return {parse_scenario(document)};
    const json& panels = document.at("panels");
    config_require(panels.is_array() && !panels.empty(), "panels must be a nonempty array");
    json base = document;
    base.erase("panels");
    std::vector<ScenarioConfig> out;
    std::set<std::string> ids;
    for (const auto& panel : panels) {
        config_require(panel.is_object() && panel.contains("panel") && panel.at("panel").is_string(),
                       "every panel needs a string 'panel' id");
        config_require(ids.insert(panel.at("panel").get<std::string>()).second, "duplicate panel id");
        json merged = base;
        merged.merge_patch(panel);
        out.push_back(parse_scenario(merged));
    }
    return out;
}

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    config_require(in.good(), "cannot read config file " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorKind::ConfigError, "malformed JSON in " + path.string() + ": " + e.what());
    }
}

void apply_override(json& document, const std::string& assignment) {
    const auto eq = assignment.find('=');
    config_require(eq != std::string::npos && eq > 0, "override must look like a.b.c=value");
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    } catch (const json::exception&) {
        value = text;
    }
    json* node = &document;
    std::stringstream segments(path);
    std::string segment;
    std::vector<std::string> parts;
    while (std::getline(segments, segment, '.')) parts.push_back(segment);
    for (std::size_t k = 0; k < parts.size(); ++k) {
        const std::string& key = parts[k];
        config_require(!key.empty(), "empty segment in override path '" + path + "'");
        json* next = nullptr;
        if (node->is_array()) {
            std::size_t index = 0;
            const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), index);
            config_require(ec == std::errc() && ptr == key.data() + key.size() && index < node->size(),
                           "bad array index '" + key + "' in override path '" + path + "'");
            next = &(*node)[index];
        } else {
            if (node->is_null()) *node = json::object();
            config_require(node->is_object(), "override path '" + path + "' descends into a scalar");
            next = &(*node)[key];
        }
        node = next;
    }
    *node = std::move(value);
}

std::string canonical_text(const json& document) {
    return document.dump();
}

std::string config_hash(const json& document) {
    std::uint64_t hash = 14695981039346656037ULL;
    for (unsigned char ch : canonical_text(document)) {
        hash ^= ch;
        hash *= 1099511628211ULL;
    }
    char buffer[17];
    std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash));
    return buffer;
}

std::string ResultTable::stem() const {
    return panel.empty() ? scenario_id : scenario_id + "_" + panel;
}

const std::vector<Column>& ResultTable::columns(Metric metric) const {
    for (std::size_t k = 0; k < metrics.size(); ++k) {
        if (metrics[k] == metric) return metric_columns[k];
    }
    fail(ErrorKind::InvalidArgument, "metric not present in table");
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

struct PointResult {
    std::vector<double> metrics;  // parallel to config.outputs
    double n_cut = 0.0;
    double leakage = 0.0;
    double discarded = 0.0;
    double n_b = 0.0;
    double f_b = 0.0;
    double f_b_normalized = 0.0;
};

struct PointSetup {
    ProbeSpec probe;
    AuxStateSpec aux;
    HamiltonianKind kind;
    std::optional<double> tau;
    std::optional<double> angle;  // rotation angle when given directly (theta or phi)
};

PointSetup setup_point(const ScenarioConfig& c, const SeriesSpec& s, double x) {
    PointSetup p{s.probe.value_or(c.probe), s.aux, effective_hamiltonian(c, s), std::nullopt, std::nullopt};
    const std::string& param = c.sweep.parameter;
    if (param == "n_atoms") p.probe.n_atoms = static_cast<int>(x);
    if (param == "beta_sq") {
        config_require(p.aux.kind == AuxKind::squeezed_coherent, "series '" + s.label + "': beta_sq sweep on a Fock auxiliary");
        p.aux.beta = std::sqrt(x);
    }
    if (param == "r") {
        config_require(p.aux.kind == AuxKind::squeezed_coherent, "series '" + s.label + "': r sweep on a Fock auxiliary");
        p.aux.r = x;
    }
    std::string time_param;
    double value = 0.0;
    if (is_time_parameter(param)) {
        time_param = param;
        value = x;
    } else if (c.fixed_tau) {
        time_param = "tau";
        value = *c.fixed_tau;
    } else if (c.fixed_theta) {
        time_param = "theta";
        value = *c.fixed_theta;
    } else if (c.fixed_phi) {
        time_param = "phi";
        value = *c.fixed_phi;
    }
    if (time_param == "tau") {
        p.tau = value;
    } else if (time_param == "theta") {
        p.angle = value;
        const double beta = p.aux.beta.real();
        config_require(beta > 0.0, "series '" + s.label + "': theta needs beta > 0");
        p.tau = value / (2.0 * beta);
    } else if (time_param == "phi") {
        p.angle = value;
        const double n_b = p.aux.mean_photon_number();
        config_require(n_b > 0.0, "series '" + s.label + "': phi needs N_B > 0");
        p.tau = value / n_b;
    }
    return p;
}

void fill_aux_diagnostics(PointResult& out, const AuxStateSpec& aux) {
    out.n_b = aux.mean_photon_number();
    const bool real_beta = aux.kind == AuxKind::fock || std::abs(aux.beta.imag()) == 0.0;
    out.f_b = real_beta ? 4.0 * aux.number_variance() : std::numeric_limits<double>::quiet_NaN();
    out.f_b_normalized = out.n_b > 0.0 ? out.f_b / (out.n_b * out.n_b) : 0.0;
}

CutoffPolicy cutoff_policy(const NumericsSpec& n) {
    return {n.leakage_tolerance, n.max_cutoff};
}

SemiclassicalOptions semiclassical_options(const NumericsSpec& n) {
    SemiclassicalOptions o;
    o.grid_points = n.grid_points;
    o.span_sigmas = n.span_sigmas;
    o.neglect_initial_dephasing = n.neglect_initial_dephasing;
    return o;
}

struct StateMetrics {
    double f_a = std::numeric_limits<double>::quiet_NaN();
    double gamma = std::numeric_limits<double>::quiet_NaN();
    double c_max = std::numeric_limits<double>::quiet_NaN();
};

StateMetrics from_density(const DensityMatrix& rho, const HermitianOperator& g, const NumericsSpec& n, PointResult& out) {
    const QfiResult q = qfi_mixed(rho, g, n.qfi_threshold);
    out.discarded = q.discarded_pair_weight;
    return {q.value, purity(rho), std::numeric_limits<double>::quiet_NaN()};
}

StateMetrics evaluate_state(const ScenarioConfig& c, const PointSetup& p, PointResult& out) {
    const NumericsSpec& n = c.numerics;
    const PureState probe = make_probe(p.probe);
    const SpinBasis basis(p.probe.n_atoms);
    const HermitianOperator g = spin_component(c.generator, basis);
    const double tau = p.tau.value_or(0.0);
    const int top = basis.dim() - 1;

    switch (p.kind) {
        case HamiltonianKind::separable_jz: {
            if (c.engine == Engine::exact) {
                const FockBasis fock = choose_cutoff(p.aux, cutoff_policy(n));
                require(static_cast<long>(fock.dim()) * basis.dim() <= n.max_dimension, ErrorKind::ResourceCeiling,
                        "composite dimension exceeds max_dimension");
                out.n_cut = fock.n_cut();
                out.leakage = fock.leakage();
                const SeparableBranches branches = separable_evolve(probe, aux_state(p.aux, fock), tau);
                StateMetrics m = from_density(reduced_density_separable(branches), g, n, out);
                m.c_max = std::abs(branch_overlap(branches, top, 0));
                return m;
            }
            if (c.engine == Engine::semiclassical) {
                const GaussianNoiseSpec noise(p.aux.mean_photon_number() * tau, std::sqrt(p.aux.number_variance()) * tau);
                StateMetrics m = from_density(semiclassical_jz(probe, noise, semiclassical_options(n)), g, n, out);
                m.c_max = std::abs(gaussian_coherence(static_cast<double>(top), noise));
                return m;
            }
            const double c_max = std::abs(number_coupling_coherence(p.aux, tau, top));
            StateMetrics m;
            m.c_max = std::min(1.0, c_max);
            m.gamma = cat_identities::gamma_from_cmax(m.c_max);
            m.f_a = qfi_revival_prediction(4.0 * p.aux.number_variance(), p.probe.n_atoms, tau);
            return m;
        }
        case HamiltonianKind::beam_splitter:
        case HamiltonianKind::classical_X_case:
        case HamiltonianKind::classical_Y_case: {
            const double beta = p.aux.beta.real();
            if (p.kind == HamiltonianKind::beam_splitter && c.engine == Engine::semiclassical) {
                const OpticalNoise noise = noise_from_optics(p.aux, tau);
                return from_density(semiclassical_bs(probe, noise.theta, noise.phi, semiclassical_options(n)), g, n, out);
            }
            if (p.kind == HamiltonianKind::beam_splitter && c.engine == Engine::analytic) {
                require(std::abs(2.0 * beta * tau - kPi / 2.0) <= 1e-9, ErrorKind::ConfigError,
                        "the analytic beam-splitter engine is defined at theta = pi/2");
                StateMetrics m;
                m.f_a = beamsplitter_generator_prediction(beta, p.aux.r, p.probe.n_atoms);
                return m;
            }
            const FockBasis fock = choose_cutoff(p.aux, cutoff_policy(n)).with_headroom(p.probe.n_atoms);
            require(fock.n_cut() <= n.max_cutoff, ErrorKind::ResourceCeiling, "Fock cutoff exceeds max_cutoff");
            require(static_cast<long>(fock.dim()) * basis.dim() <= n.max_dimension, ErrorKind::ResourceCeiling,
                    "composite dimension exceeds max_dimension");
            const CompositeBasis composite(basis, fock);
            const std::string key = propagator_key(p.kind, composite, beta);
            const auto propagator = PropagatorCache::global().get_or_build(key, [&] {
                if (p.kind == HamiltonianKind::beam_splitter) return Propagator::build(beamsplitter_hamiltonian(composite));
                const CaseKind which = p.kind == HamiltonianKind::classical_X_case ? CaseKind::classical_X : CaseKind::classical_Y;
                return Propagator::build(case_hamiltonian(which, beta, composite));
            });
            const PureState psi = propagator->evolve(product_state(probe, aux_state(p.aux, fock)), tau);
            out.n_cut = fock.n_cut();
            out.leakage = std::max(fock.leakage(), fock_edge_population(psi, 2));
            return from_density(partial_trace_B(psi), g, n, out);
        }
        case HamiltonianKind::classical_rotation: {
            double angle = 0.0;
            if (p.angle) {
                angle = *p.angle;
            } else if (c.rotation_axis == CartesianAxis::x) {
                angle = 2.0 * p.aux.beta.real() * tau;
            } else {
                angle = p.aux.mean_photon_number() * tau;
            }
            const PureState rotated = classical_rotation(probe, c.rotation_axis, angle);
            StateMetrics m;
            m.f_a = qfi_pure(rotated, g).value;
            m.gamma = 1.0;
            return m;
        }
    }
    fail(ErrorKind::EngineError, "unhandled Hamiltonian");
}

PointResult evaluate_point(const ScenarioConfig& c, const SeriesSpec& s, double x) {
    const PointSetup p = setup_point(c, s, x);
    PointResult out;
    fill_aux_diagnostics(out, p.aux);
    const bool needs_state = std::any_of(c.outputs.begin(), c.outputs.end(), [](Metric m) { return m != Metric::N_B_TFS; });
    StateMetrics state;
    if (needs_state) state = evaluate_state(c, p, out);
    for (Metric metric : c.outputs) {
        switch (metric) {
            case Metric::F_A: out.metrics.push_back(state.f_a); break;
            case Metric::gamma: out.metrics.push_back(state.gamma); break;
            case Metric::C_max: out.metrics.push_back(state.c_max); break;
            case Metric::N_B_TFS: {
                const NumericsSpec& n = c.numerics;
                if (c.engine == Engine::analytic) {
                    const double r = p.aux.kind == AuxKind::fock ? 0.0 : p.aux.r;
                    out.metrics.push_back(nb_tfs(n.nb_tfs_regime, p.probe.n_atoms, n.nb_tfs_angle, r));
                    break;
                }
                NbTfsOptions options;
                options.engine = c.engine == Engine::exact ? NbTfsEngine::exact : NbTfsEngine::semiclassical;
                options.exact_max_atoms = n.exact_max_atoms;
                options.cutoff = cutoff_policy(n);
                options.semiclassical = semiclassical_options(n);
                out.metrics.push_back(
                    nb_tfs_empirical(n.nb_tfs_regime, p.probe.n_atoms, n.nb_tfs_angle, p.aux, options).n_b);
                break;
            }
        }
    }
    return out;
}

int resolve_threads(int threads) {
    if (threads > 0) return threads;
    if (const char* env = std::getenv("SPINCAT_THREADS")) {
        int value = 0;
        const std::string text(env);
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec == std::errc() && value > 0) return value;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// Runs task(i) for i in [0, count) on a small pool. Results are written by
// index, so scheduling does not affect the output. The exception of the lowest
// failing index is rethrown.
template <class Task>
void parallel_for(std::size_t count, int threads, Task&& task) {
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                task(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int n = std::max(1, std::min<int>(threads, static_cast<int>(count)));
    std::vector<std::thread> pool;
    for (int t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 2, ErrorKind::InvalidArgument, "need at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        require(x[k] > 0.0 && y[k] > 0.0, ErrorKind::InvalidArgument, "log-log fit needs positive data");
        const double lx = std::log(x[k]);
        const double ly = std::log(y[k]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ResultTable run_scenario(const ScenarioConfig& c, int threads) {
    const std::size_t points = c.sweep.values.size();
    const std::size_t series = c.series.size();
    std::vector<PointResult> results(points * series);
    try {
        parallel_for(points * series, resolve_threads(threads), [&](std::size_t i) {
            results[i] = evaluate_point(c, c.series[i % series], c.sweep.values[i / series]);
        });
    } catch (const Error& e) {
        switch (e.kind()) {
            case ErrorKind::ConfigError:
            case ErrorKind::ResourceCeiling:
                throw;
            case ErrorKind::CutoffSearchFailed:
                fail(ErrorKind::ResourceCeiling, e.what());
            default:
                fail(ErrorKind::EngineError, e.what());
        }
    }

    ResultTable t;
    t.scenario_id = c.scenario_id;
    t.panel = c.panel;
    t.sweep_name = c.sweep.parameter;
    t.sweep = c.sweep.values;
    t.metrics = c.outputs;
    for (std::size_t m = 0; m < c.outputs.size(); ++m) {
        std::vector<Column> columns;
        for (std::size_t s = 0; s < series; ++s) {
            Column col{std::string(to_string(c.outputs[m])) + "[" + c.series[s].label + "]", {}};
            for (std::size_t k = 0; k < points; ++k) col.values.push_back(results[k * series + s].metrics[m]);
            columns.push_back(std::move(col));
        }
        t.metric_columns.push_back(std::move(columns));
    }
    const std::vector<std::pair<std::string, double PointResult::*>> diagnostics{
        {"n_cut", &PointResult::n_cut},       {"leakage", &PointResult::leakage}, {"discarded_pair_weight", &PointResult::discarded},
        {"N_B", &PointResult::n_b},           {"F_B", &PointResult::f_b},         {"F_B_normalized", &PointResult::f_b_normalized}};
    for (const auto& [name, member] : diagnostics) {
        for (std::size_t s = 0; s < series; ++s) {
            Column col{name + "[" + c.series[s].label + "]", {}};
            for (std::size_t k = 0; k < points; ++k) col.values.push_back(results[k * series + s].*member);
            t.diagnostics.push_back(std::move(col));
        }
    }

    json meta;
    meta["scenario_id"] = c.scenario_id;
    meta["panel"] = c.panel;
    meta["description"] = c.description;
    meta["engine"] = std::string(to_string(c.engine));
    meta["hamiltonian"] = std::string(to_string(c.hamiltonian));
    meta["generator"] = std::string(to_string(c.generator));
    meta["sweep_parameter"] = c.sweep.parameter;
    meta["points"] = points;
    meta["series"] = json::array();
    for (const auto& s : c.series) meta["series"].push_back(s.label);
    meta["config_hash"] = config_hash(c.source);
    meta["config"] = c.source;
    meta["software"] = {{"name", "spincat"},
                        {"version", kVersion},
                        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                      std::to_string(EIGEN_MINOR_VERSION)},
                        {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                              std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                              std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
    double worst_leakage = 0.0;
    double worst_discarded = 0.0;
    for (const auto& r : results) {
        worst_leakage = std::max(worst_leakage, r.leakage);
        worst_discarded = std::max(worst_discarded, r.discarded);
    }
    meta["max_leakage"] = worst_leakage;
    meta["max_discarded_pair_weight"] = worst_discarded;
    if (has_metric(c, Metric::N_B_TFS) && c.sweep.parameter == "n_atoms" && points >= 2) {
        json fits = json::object();
        for (const auto& col : t.columns(Metric::N_B_TFS)) fits[col.name] = loglog_slope(t.sweep, col.values);
        meta["loglog_slope"] = fits;
    }
    t.metadata = std::move(meta);
    return t;
}

DiscrepancyReport compare_engines(const ScenarioConfig& a, const ScenarioConfig& b, double tolerance, int threads) {
    require(tolerance >= 0.0, ErrorKind::InvalidArgument, "tolerance must be nonnegative");
    json sa = a.source;
    json sb = b.source;
    for (const char* key : {"engine", "scenario_id", "description"}) {
        sa.erase(key);
        sb.erase(key);
    }
    require(sa == sb, ErrorKind::IncompatibleConfigs, "configs differ in more than the engine");
    const ResultTable ta = run_scenario(a, threads);
    const ResultTable tb = run_scenario(b, threads);
    DiscrepancyReport report;
    report.tolerance = tolerance;
    for (std::size_t m = 0; m < ta.metrics.size(); ++m) {
        const auto& ca = ta.metric_columns[m];
        const auto& cb = tb.columns(ta.metrics[m]);
        for (std::size_t s = 0; s < ca.size(); ++s) {
            EngineDiscrepancy d;
            d.metric = std::string(to_string(ta.metrics[m]));
            d.series = a.series[s].label;
            double sum = 0.0;
            // Relative differences are floored at 1e-6 of the column's largest
            // magnitude so values that decay to round-off do not dominate.
            double column_scale = 0.0;
            for (std::size_t k = 0; k < ca[s].values.size(); ++k) {
                for (double v : {ca[s].values[k], cb[s].values[k]}) {
                    if (std::isfinite(v)) column_scale = std::max(column_scale, std::abs(v));
                }
            }
            for (std::size_t k = 0; k < ca[s].values.size(); ++k) {
                const double x = ca[s].values[k];
                const double y = cb[s].values[k];
                const double diff = std::abs(x - y);
                const double scale = std::max({std::abs(x), std::abs(y), 1e-6 * column_scale});
                const double rel = diff == 0.0 ? 0.0 : (scale > 0.0 ? diff / scale : 0.0);
                const bool bad = std::isnan(x) != std::isnan(y);
                d.abs_diff.push_back(bad ? std::numeric_limits<double>::infinity() : (std::isnan(diff) ? 0.0 : diff));
                d.rel_diff.push_back(bad ? std::numeric_limits<double>::infinity() : (std::isnan(rel) ? 0.0 : rel));
                d.max_abs = std::max(d.max_abs, d.abs_diff.back());
                d.max_rel = std::max(d.max_rel, d.rel_diff.back());
                sum += d.rel_diff.back();
            }
            d.mean_rel = d.rel_diff.empty() ? 0.0 : sum / static_cast<double>(d.rel_diff.size());
            report.max_rel = std::max(report.max_rel, d.max_rel);
            report.entries.push_back(std::move(d));
        }
    }
    report.within_tolerance = report.max_rel <= tolerance;
    return report;
}

// ---------------------------------------------------------------------------
// Output

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    require(ec == std::errc(), ErrorKind::IoError, "number formatting failed");
    return std::string(buffer, ptr);
}

std::string csv_text(const ResultTable& table, Metric metric) {
    const auto& columns = table.columns(metric);
    std::string out = table.sweep_name;
    for (const auto& col : columns) out += "," + col.name;
    for (const auto& col : table.diagnostics) out += "," + col.name;
    out += "\n";
    for (std::size_t k = 0; k < table.sweep.size(); ++k) {
        out += format_double(table.sweep[k]);
        for (const auto& col : columns) out += "," + format_double(col.values[k]);
        for (const auto& col : table.diagnostics) out += "," + format_double(col.values[k]);
        out += "\n";
    }
    return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), ErrorKind::IoError, "cannot write " + path.string());
    out << text;
    require(out.good(), ErrorKind::IoError, "write failed for " + path.string());
}

std::string plot_script(const ResultTable& table) {
    std::ostringstream gp;
    gp << "# gnuplot script for " << table.stem() << "\n";
    gp << "set datafile separator ','\n";
    gp << "set key autotitle columnhead\n";
    gp << "set terminal pngcairo size 900,600\n";
    gp << "set xlabel '" << table.sweep_name << "'\n";
    for (std::size_t m = 0; m < table.metrics.size(); ++m) {
        const std::string metric(to_string(table.metrics[m]));
        const std::size_t last = table.metric_columns[m].size() + 1;
        gp << "\nset output '" << table.stem() << "_" << metric << ".png'\n";
        gp << "set ylabel '" << metric << "'\n";
        if (table.metrics[m] == Metric::N_B_TFS) {
            gp << "set logscale xy\n";
        } else {
            gp << "unset logscale\n";
        }
        gp << "plot for [i=2:" << last << "] '" << table.stem() << "_" << metric << ".csv' using 1:i with linespoints\n";
    }
    return gp.str();
}

}  // namespace

std::vector<std::filesystem::path> emit_outputs(const ResultTable& table, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    require(!ec && std::filesystem::is_directory(dir), ErrorKind::IoError, "cannot create output directory " + dir.string());
    std::vector<std::filesystem::path> written;
    for (Metric metric : table.metrics) {
        const auto path = dir / (table.stem() + "_" + std::string(to_string(metric)) + ".csv");
        write_file(path, csv_text(table, metric));
        written.push_back(path);
    }
    const auto gp = dir / (table.stem() + ".gp");
    write_file(gp, plot_script(table));
    written.push_back(gp);
    const auto meta = dir / (table.stem() + ".json");
    write_file(meta, table.metadata.dump(2) + "\n");
    written.push_back(meta);
    return written;
}

}  // namespace spincat
