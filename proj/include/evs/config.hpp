// Copyright 2026 The evs-toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

/**
 * @file
 * Experiment configuration: INI text with sections.
 *
 * @code
 * seed = 7
 *
 * [target]
 * family = uniform1d        ; uniform1d uniform bimodal1d gaussian gaussian2d dirichlet file
 *
 * [encoder]
 * kind = product            ; product dense simplex
 * layers = 4
 *
 * [sample]
 * n = 1000
 * @endcode
 *
 * Parsing reports every problem at once, each prefixed by its key path.
 * Relative file paths resolve against the config file's directory.
 */

#include <charconv>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "evs/error.hpp"
#include "evs/generators.hpp"
#include "evs/io.hpp"
#include "evs/reuploading.hpp"
#include "evs/sample_set.hpp"

namespace evs {

/// Validation failure carrying every error found.
class ConfigError : public ValidationError {
  public:
    explicit ConfigError(std::vector<std::string> errors)
        : ValidationError(join(errors)), errors_(std::move(errors)) {}

    [[nodiscard]] const std::vector<std::string> &errors() const { return errors_; }

  private:
    static std::string join(const std::vector<std::string> &errors) {
        std::string out = "invalid config:";
        for (const auto &e : errors) {
            out += "\n  " + e;
        }
        return out;
    }
    std::vector<std::string> errors_;
};

inline const std::vector<std::string> &command_names() {
    static const std::vector<std::string> names{"fit", "sample", "w1", "analyze-rank", "analyze-fourier", "check"};
    return names;
}

struct TargetSpec {
    std::string family;
    int dims = 1;
    double rho = 0.0;
    int truncation = 3;
    int offset = 0; // k0
    std::vector<double> alpha;
    std::filesystem::path file;
    int resolution = 0; // 0: default for the dimension
};

struct EncoderSpec {
    EncoderKind kind = EncoderKind::product;
    int layers = 0;
    int output_dim = 0; // simplex: number of simplex coordinates
    PrepMode prep = PrepMode::exact_injection;
};

struct SampleSpec {
    std::size_t n = 0;
    SampleMode mode = SampleMode::exact;
    int shots = 0;
    double epsilon = 0.0;
    std::filesystem::path model; // empty: build from target + encoder
    std::string output = "samples.csv";
};

struct W1Spec {
    std::filesystem::path a, b;
    std::string method = "auto";
    int projections = 256;
    std::string output = "w1.json";
};

struct AnalyzeSpec {
    std::string source = "reuploading";
    std::filesystem::path model;
    int data_dim = 1;
    int layers = 1;
    bool integer_spectrum = true; // data weights fixed to 1
    std::size_t samples = 4096;
    double threshold = 1e-8;
    int cutoff = 0;
    int quadrature = 0; // 0: 4K + 4
    int output = 0;
};

struct CheckSpec {
    int n_qubits = 0;
    int output_dim = 0;
    double epsilon = 0.0;
    std::string observable;          // Pauli string; empty with eigenvalues set
    std::vector<double> eigenvalues; // diagonal observable
    std::vector<double> q_grid;
};

struct ExperimentConfig {
    std::uint64_t seed = 0;
    std::optional<std::string> command;
    std::optional<TargetSpec> target;
    std::optional<EncoderSpec> encoder;
    FitConfig fit;
    std::optional<SampleSpec> sample;
    std::optional<W1Spec> w1;
    std::optional<AnalyzeSpec> analyze;
    std::optional<CheckSpec> check;
    std::filesystem::path base_dir;
    std::string text; // source bytes, for hashing

    /// Digest of the config text and the effective seed.
    [[nodiscard]] std::string hash() const {
        return io::content_hash(text + "\n;effective seed=" + std::to_string(seed) + "\n");
    }
};

namespace detail {

using boost::property_tree::ptree;

inline std::string join_values(const std::vector<std::string> &v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out += (i ? ", " : "") + v[i];
    }
    return out;
}

template <class T> std::optional<T> parse_number(const std::string &s) {
    T v{};
    const char *b = s.data();
    const char *e = s.data() + s.size();
    const auto r = std::from_chars(b, e, v);
    if (r.ec != std::errc{} || r.ptr != e) {
        return std::nullopt;
    }
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(v)) {
            return std::nullopt;
        }
    }
    return v;
}

inline std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

/// Typed access to one INI tree with error collection and unknown-key detection.
class ConfigReader {
  public:
    ConfigReader(const ptree &root, std::vector<std::string> &errors) : root_(root), errors_(errors) {}

    [[nodiscard]] bool has_section(const std::string &section) const {
        return root_.get_child_optional(section).has_value() && !root_.get_child(section).empty();
    }

    void declare_section(const std::string &section, std::set<std::string> keys) {
        known_[section] = std::move(keys);
    }

    [[nodiscard]] std::optional<std::string> raw(const std::string &path) const {
        auto v = root_.get_optional<std::string>(ptree::path_type(path, '.'));
        if (!v) {
            return std::nullopt;
        }
        return trim(*v);
    }

    void error(const std::string &path, const std::string &msg) { errors_.push_back(path + ": " + msg); }

    template <class T> std::optional<T> number(const std::string &path, std::optional<T> lo = {}) {
        const auto s = raw(path);
        if (!s) {
            return std::nullopt;
        }
        auto v = parse_number<T>(*s);
        if (!v) {
            error(path, std::string("expected ") + (std::is_integral_v<T> ? "an integer" : "a number") + ", got '" +
                            *s + "'");
            return std::nullopt;
        }
        if (lo && *v < *lo) {
            std::ostringstream os;
            os << "must be >= " << *lo;
            error(path, os.str());
            return std::nullopt;
        }
        return v;
    }

    std::optional<std::string> choice(const std::string &path, const std::vector<std::string> &allowed) {
        const auto s = raw(path);
        if (!s) {
            return std::nullopt;
        }
        if (std::find(allowed.begin(), allowed.end(), *s) == allowed.end()) {
            error(path, "unknown value '" + *s + "'; allowed values: " + join_values(allowed));
            return std::nullopt;
        }
        return s;
    }

    std::optional<bool> boolean(const std::string &path) {
        const auto s = raw(path);
        if (!s) {
            return std::nullopt;
        }
        if (*s == "true" || *s == "1" || *s == "yes") {
            return true;
        }
        if (*s == "false" || *s == "0" || *s == "no") {
            return false;
        }
        error(path, "expected a boolean, got '" + *s + "'");
        return std::nullopt;
    }

    std::optional<std::vector<double>> number_list(const std::string &path) {
        const auto s = raw(path);
        if (!s) {
            return std::nullopt;
        }
        std::vector<double> out;
        std::stringstream ss(*s);
        for (std::string item; std::getline(ss, item, ',');) {
            const auto v = parse_number<double>(trim(item));
            if (!v) {
                error(path, "expected a comma-separated list of numbers, got '" + *s + "'");
                return std::nullopt;
            }
            out.push_back(*v);
        }
        if (out.empty()) {
            error(path, "empty list");
            return std::nullopt;
        }
        return out;
    }

    /// Reports keys and sections that are not declared.
    void check_unknown() {
        for (const auto &[name, node] : root_) {
            if (node.empty()) {
                if (!known_[""].count(name)) {
                    error(name, "unknown key");
                }
                continue;
            }
            const auto it = known_.find(name);
            if (it == known_.end() || name.empty()) {
                error(name, "unknown section");
                continue;
            }
            for (const auto &[key, leaf] : node) {
                if (!it->second.count(key)) {
                    error(name + "." + key, "unknown key");
                }
            }
        }
    }

  private:
    const ptree &root_;
    std::vector<std::string> &errors_;
    std::map<std::string, std::set<std::string>> known_;
};

inline std::filesystem::path resolve(const std::filesystem::path &base, const std::string &p) {
    const std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

} // namespace detail

inline const std::vector<std::string> &target_families() {
    static const std::vector<std::string> v{"uniform1d", "uniform",   "bimodal1d", "gaussian",
                                            "gaussian2d", "dirichlet", "file"};
    return v;
}

/// Errors for keys a command needs but the config lacks.
inline std::vector<std::string> missing_for_command(const ExperimentConfig &c, const std::string &command) {
    std::vector<std::string> e;
    const auto need_model_source = [&] {
        if (!c.target) {
            e.emplace_back("target: section required");
        }
        if (!c.encoder) {
            e.emplace_back("encoder: section required");
        } else if (c.encoder->kind == EncoderKind::product && c.encoder->layers < 1) {
            e.emplace_back("encoder.layers: required for the product encoder");
        }
    };
    if (std::find(command_names().begin(), command_names().end(), command) == command_names().end()) {
        e.push_back("command: unknown value '" + command + "'; allowed values: " + detail::join_values(command_names()));
        return e;
    }
    if (command == "fit") {
        need_model_source();
    } else if (command == "sample") {
        if (!c.sample || c.sample->n == 0) {
            e.emplace_back("sample.n: required");
        }
        if (!c.sample || c.sample->model.empty()) {
            need_model_source();
        }
        if (c.sample && c.sample->mode == SampleMode::shots && c.sample->shots < 1) {
            e.emplace_back("sample.shots: required for mode = shots");
        }
        if (c.sample && c.sample->mode == SampleMode::gaussian && !(c.sample->epsilon > 0.0)) {
            e.emplace_back("sample.epsilon: required for mode = gaussian");
        }
    } else if (command == "w1") {
        if (!c.w1 || c.w1->a.empty()) {
            e.emplace_back("w1.a: required");
        }
        if (!c.w1 || c.w1->b.empty()) {
            e.emplace_back("w1.b: required");
        }
    } else if (command == "analyze-rank" || command == "analyze-fourier") {
        if (c.analyze && c.analyze->source == "model" && c.analyze->model.empty()) {
            e.emplace_back("analyze.model: required for source = model");
        }
        if (command == "analyze-fourier" && (!c.analyze || c.analyze->cutoff < 1)) {
            e.emplace_back("analyze.cutoff: required");
        }
    } else if (command == "check") {
        if (!c.check || c.check->n_qubits < 1) {
            e.emplace_back("check.n_qubits: required");
        }
        if (!c.check || c.check->output_dim < 1) {
            e.emplace_back("check.output_dim: required");
        }
        if (!c.check || !(c.check->epsilon > 0.0)) {
            e.emplace_back("check.epsilon: required");
        }
    }
    return e;
}

/// Parses INI text. `base_dir` anchors relative paths.
inline ExperimentConfig parse_config_text(const std::string &text, const std::filesystem::path &base_dir = {}) {
    namespace pt = boost::property_tree;
    pt::ptree root;
    try {
        std::istringstream in(text);
        pt::read_ini(in, root);
    } catch (const pt::ini_parser_error &e) {
        throw ConfigError({"syntax: " + e.message() + " (line " + std::to_string(e.line()) + ")"});
    }

    std::vector<std::string> errors;
    detail::ConfigReader r(root, errors);
    r.declare_section("", {"seed", "command"});
    r.declare_section("target", {"family", "dims", "rho", "truncation", "offset", "alpha", "file", "resolution"});
    r.declare_section("encoder", {"kind", "layers", "prep"});
    r.declare_section("fit", {"grid_points", "max_iters", "step_size", "gradient", "tolerance", "restarts", "fd_step"});
    r.declare_section("sample", {"n", "mode", "shots", "epsilon", "model", "output"});
    r.declare_section("w1", {"a", "b", "method", "projections", "output"});
    r.declare_section("analyze", {"source", "model", "data_dim", "layers", "integer_spectrum", "samples",
                                  "threshold", "cutoff", "quadrature", "output"});
    r.declare_section("check", {"n_qubits", "output_dim", "epsilon", "observable", "eigenvalues", "q_grid"});
    r.check_unknown();

    ExperimentConfig c;
    c.text = text;
    c.base_dir = base_dir;

    if (!r.raw("seed")) {
        errors.emplace_back("seed: required key is missing");
    } else if (auto s = r.number<std::uint64_t>("seed")) {
        c.seed = *s;
    }
    c.command = r.choice("command", command_names());

    const auto must_exist = [&](const std::string &key, const std::filesystem::path &p) {
        if (!std::filesystem::exists(p)) {
            r.error(key, "file not found: '" + p.string() + "'");
        }
    };

    if (r.has_section("target")) {
        TargetSpec t;
        if (auto f = r.choice("target.family", target_families())) {
            t.family = *f;
        } else if (!r.raw("target.family")) {
            r.error("target.family", "required key is missing");
        }
        t.dims = r.number<int>("target.dims", 1).value_or(t.family == "gaussian2d" ? 2 : 1);
        t.rho = r.number<double>("target.rho").value_or(0.0);
        if (std::abs(t.rho) >= 1.0) {
            r.error("target.rho", "must satisfy |rho| < 1");
        }
        t.truncation = r.number<int>("target.truncation", 1).value_or(3);
        t.offset = r.number<int>("target.offset", 0).value_or(0);
        t.resolution = r.number<int>("target.resolution", 1).value_or(0);
        if (auto a = r.number_list("target.alpha")) {
            t.alpha = *a;
            for (double v : t.alpha) {
                if (!(v > 0.0)) {
                    r.error("target.alpha", "concentrations must be positive");
                    break;
                }
            }
        }
        if (t.family == "uniform1d" || t.family == "bimodal1d") {
            t.dims = 1;
        }
        if (t.family == "gaussian2d") {
            t.dims = 2;
        }
        if (t.family == "dirichlet") {
            if (t.alpha.size() < 2) {
                r.error("target.alpha", "dirichlet needs at least two concentrations");
            }
            t.dims = static_cast<int>(t.alpha.size());
        }
        if (t.family == "file") {
            if (auto f = r.raw("target.file")) {
                t.file = detail::resolve(base_dir, *f);
                must_exist("target.file", io::with_suffix(t.file, ".header.csv"));
            } else {
                r.error("target.file", "required for family = file");
            }
        }
        c.target = t;
    }

    if (r.has_section("encoder")) {
        EncoderSpec e;
        if (auto k = r.choice("encoder.kind", {"product", "dense", "simplex"})) {
            e.kind = encoder_kind_from_string(*k);
        } else if (!r.raw("encoder.kind")) {
            r.error("encoder.kind", "required key is missing");
        }
        e.layers = r.number<int>("encoder.layers", 1).value_or(0);
        if (auto p = r.choice("encoder.prep", {"exact_injection", "rotation_cascade"})) {
            e.prep = prep_mode_from_string(*p);
        }
        if (c.target && e.kind == EncoderKind::simplex && c.target->family != "dirichlet") {
            r.error("encoder.kind", "simplex requires target.family = dirichlet");
        }
        if (c.target && e.kind != EncoderKind::simplex && c.target->family == "dirichlet") {
            r.error("target.family", "dirichlet targets require encoder.kind = simplex");
        }
        c.encoder = e;
    }

    if (r.has_section("fit")) {
        FitConfig &f = c.fit;
        f.grid_points_per_dim = r.number<int>("fit.grid_points", 2).value_or(f.grid_points_per_dim);
        f.max_iters = r.number<int>("fit.max_iters", 1).value_or(f.max_iters);
        f.step_size = r.number<double>("fit.step_size", 0.0).value_or(f.step_size);
        f.tolerance = r.number<double>("fit.tolerance", 0.0).value_or(f.tolerance);
        f.restarts = r.number<int>("fit.restarts", 1).value_or(f.restarts);
        f.fd_step = r.number<double>("fit.fd_step", 0.0).value_or(f.fd_step);
        if (auto g = r.choice("fit.gradient", {"finite_difference", "parameter_shift"})) {
            f.gradient_mode = *g == "parameter_shift" ? GradientMode::parameter_shift : GradientMode::finite_difference;
        }
    }

    if (r.has_section("sample")) {
        SampleSpec s;
        s.n = r.number<std::size_t>("sample.n", 1).value_or(0);
        if (auto m = r.choice("sample.mode", {"exact", "shots", "gaussian"})) {
            s.mode = sample_mode_from_string(*m);
        }
        s.shots = r.number<int>("sample.shots", 1).value_or(0);
        s.epsilon = r.number<double>("sample.epsilon", 0.0).value_or(0.0);
        if (auto m = r.raw("sample.model")) {
            s.model = detail::resolve(base_dir, *m);
            must_exist("sample.model", s.model);
        }
        s.output = r.raw("sample.output").value_or(s.output);
        c.sample = s;
    }

    if (r.has_section("w1")) {
        W1Spec w;
        if (auto a = r.raw("w1.a")) {
            w.a = detail::resolve(base_dir, *a);
            must_exist("w1.a", w.a);
        }
        if (auto b = r.raw("w1.b")) {
            w.b = detail::resolve(base_dir, *b);
            must_exist("w1.b", w.b);
        }
        w.method = r.choice("w1.method", {"auto", "1d", "exact", "sliced"}).value_or(w.method);
        w.projections = r.number<int>("w1.projections", 1).value_or(w.projections);
        w.output = r.raw("w1.output").value_or(w.output);
        c.w1 = w;
    }

    if (r.has_section("analyze")) {
        AnalyzeSpec a;
        a.source = r.choice("analyze.source", {"reuploading", "model"}).value_or(a.source);
        if (auto m = r.raw("analyze.model")) {
            a.model = detail::resolve(base_dir, *m);
            must_exist("analyze.model", a.model);
        }
        a.data_dim = r.number<int>("analyze.data_dim", 1).value_or(a.data_dim);
        a.layers = r.number<int>("analyze.layers", 1).value_or(a.layers);
        a.integer_spectrum = r.boolean("analyze.integer_spectrum").value_or(a.integer_spectrum);
        a.samples = r.number<std::size_t>("analyze.samples", 2).value_or(a.samples);
        a.threshold = r.number<double>("analyze.threshold", 0.0).value_or(a.threshold);
        a.cutoff = r.number<int>("analyze.cutoff", 1).value_or(a.cutoff);
        a.quadrature = r.number<int>("analyze.quadrature", 4).value_or(a.quadrature);
        a.output = r.number<int>("analyze.output", 0).value_or(a.output);
        if (a.quadrature != 0 && a.cutoff > 0 && a.quadrature < 4 * a.cutoff + 4) {
            r.error("analyze.quadrature", "must be >= 4 * cutoff + 4");
        }
        c.analyze = a;
    }

    if (r.has_section("check")) {
        CheckSpec k;
        k.n_qubits = r.number<int>("check.n_qubits", 1).value_or(0);
        k.output_dim = r.number<int>("check.output_dim", 1).value_or(0);
        k.epsilon = r.number<double>("check.epsilon", 0.0).value_or(0.0);
        if (r.raw("check.epsilon") && !(k.epsilon > 0.0 && k.epsilon < 1.0)) {
            r.error("check.epsilon", "must lie in (0, 1)");
        }
        k.observable = r.raw("check.observable").value_or("");
        if (!k.observable.empty()) {
            if (k.observable.find_first_not_of("IXYZ") != std::string::npos) {
                r.error("check.observable", "expected a Pauli string over I, X, Y, Z");
            } else if (k.n_qubits > 0 && k.observable.size() != static_cast<std::size_t>(k.n_qubits)) {
                r.error("check.observable", "length must equal check.n_qubits");
            }
        }
        k.eigenvalues = r.number_list("check.eigenvalues").value_or(std::vector<double>{});
        if (!k.observable.empty() && !k.eigenvalues.empty()) {
            r.error("check.eigenvalues", "give either check.observable or check.eigenvalues, not both");
        }
        if (auto q = r.number_list("check.q_grid")) {
            k.q_grid = *q;
            for (double v : k.q_grid) {
                if (!(v > 0.5 && v < 1.0)) {
                    r.error("check.q_grid", "entries must lie in (1/2, 1)");
                    break;
                }
            }
        }
        c.check = k;
    }

    if (errors.empty() && c.command) {
        errors = missing_for_command(c, *c.command);
    }
    if (!errors.empty()) {
        throw ConfigError(std::move(errors));
    }
    return c;
}

inline ExperimentConfig parse_config(const std::filesystem::path &path) {
    std::string text;
    try {
        text = io::read_file(path);
    } catch (const ValidationError &) {
        throw ConfigError({"config: cannot read '" + path.string() + "'"});
    }
    return parse_config_text(text, path.parent_path());
}

} // namespace evs
