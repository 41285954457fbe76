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
 * File formats.
 *
 *  - SampleSet CSV: optional leading `#` comment lines, header `y1,...,yM`,
 *    one row per sample, 17 significant digits, `\n` line endings.
 *    Metadata goes to a JSON sidecar `<csv>.meta.json`.
 *  - GridDensity pair: `<stem>.header.csv` with the columns
 *    `dims,resolution,support_lo,support_hi,retained_mass` and a payload of
 *    row-major values in `<stem>.values.csv` (one per line) or
 *    `<stem>.values.bin` (little-endian float64).
 *  - Model file: JSON with `format = "evs-model"` and a `version` field.
 *
 * All writers go through a temporary file and a rename.
 */

#include <bit>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "evs/analysis.hpp"
#include "evs/error.hpp"
#include "evs/generators.hpp"
#include "evs/metrics.hpp"
#include "evs/sample_set.hpp"
#include "evs/target_maps.hpp"

namespace evs::io {

using json = nlohmann::json;

inline constexpr int kModelFormatVersion = 1;

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// FNV-1a 64-bit digest as 16 hex characters.
inline std::string content_hash(const std::string &bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

inline std::string read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot open '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void atomic_write(const std::filesystem::path &path, const std::string &content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw RuntimeError("cannot write '" + tmp.string() + "'");
        }
        out << content;
        if (!out.flush()) {
            throw RuntimeError("write failed for '" + tmp.string() + "'");
        }
    }
    std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// SampleSet
// ---------------------------------------------------------------------------

inline std::string samples_to_csv(const SampleSet &s, const std::vector<std::string> &comments = {}) {
    std::string out;
    for (const auto &c : comments) {
        out += "# " + c + "\n";
    }
    for (std::size_t j = 0; j < s.dims; ++j) {
        out += (j ? ",y" : "y") + std::to_string(j + 1);
    }
    out += "\n";
    for (std::size_t i = 0; i < s.rows; ++i) {
        for (std::size_t j = 0; j < s.dims; ++j) {
            if (j) {
                out += ',';
            }
            out += format_double(s.at(i, j));
        }
        out += '\n';
    }
    return out;
}

inline SampleSet samples_from_csv(const std::string &text, const std::string &origin = "<csv>") {
    std::istringstream in(text);
    std::string line;
    std::size_t dims = 0;
    bool have_header = false;
    std::vector<double> values;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            cells.push_back(cell);
        }
        if (!have_header) {
            for (std::size_t j = 0; j < cells.size(); ++j) {
                detail::require(cells[j] == "y" + std::to_string(j + 1),
                                origin + ": header must be y1,...,yM");
            }
            dims = cells.size();
            detail::require(dims >= 1, origin + ": empty header");
            have_header = true;
            continue;
        }
        detail::require(cells.size() == dims, origin + ":" + std::to_string(line_no) + ": expected " +
                                                  std::to_string(dims) + " columns");
        for (const auto &c : cells) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(c, &used);
            } catch (const std::exception &) {
                used = 0;
            }
            detail::require(used == c.size() && std::isfinite(v),
                            origin + ":" + std::to_string(line_no) + ": invalid number '" + c + "'");
            values.push_back(v);
        }
    }
    detail::require(have_header, origin + ": missing header");
    const std::size_t rows = values.size() / dims;
    return SampleSet::from_values(rows, dims, std::move(values));
}

inline json metadata_json(const SampleSet &s) {
    json j;
    j["seed"] = s.meta.seed;
    j["mode"] = to_string(s.meta.mode);
    if (s.meta.mode == SampleMode::shots) {
        j["shots"] = s.meta.shots;
    }
    if (s.meta.mode == SampleMode::gaussian) {
        j["epsilon"] = s.meta.epsilon;
    }
    j["model_id"] = s.meta.model_id;
    j["N"] = s.rows;
    j["M"] = s.dims;
    return j;
}

inline std::filesystem::path metadata_path(const std::filesystem::path &csv) {
    std::filesystem::path p = csv;
    p += ".meta.json";
    return p;
}

inline void write_samples(const SampleSet &s, const std::filesystem::path &csv, const std::string &config_hash = {}) {
    std::vector<std::string> comments;
    json meta = metadata_json(s);
    if (!config_hash.empty()) {
        comments.push_back("config_hash=" + config_hash);
        meta["config_hash"] = config_hash;
    }
    atomic_write(csv, samples_to_csv(s, comments));
    atomic_write(metadata_path(csv), meta.dump(2) + "\n");
}

inline SampleSet read_samples(const std::filesystem::path &csv) {
    SampleSet s = samples_from_csv(read_file(csv), csv.string());
    const auto meta = metadata_path(csv);
    if (std::filesystem::exists(meta)) {
        const json j = json::parse(read_file(meta));
        s.meta.seed = j.value("seed", std::uint64_t{0});
        s.meta.mode = sample_mode_from_string(j.value("mode", std::string("exact")));
        s.meta.shots = j.value("shots", 0);
        s.meta.epsilon = j.value("epsilon", 0.0);
        s.meta.model_id = j.value("model_id", std::string());
    }
    return s;
}

// ---------------------------------------------------------------------------
// GridDensity
// ---------------------------------------------------------------------------

enum class PayloadFormat { csv, binary };

inline std::filesystem::path with_suffix(const std::filesystem::path &stem, const std::string &suffix) {
    std::filesystem::path p = stem;
    p += suffix;
    return p;
}

inline void write_grid_density(const GridDensity &g, const std::filesystem::path &stem,
                               PayloadFormat format = PayloadFormat::csv) {
    std::string header = "dims,resolution,support_lo,support_hi,retained_mass\n";
    header += std::to_string(g.dims) + "," + std::to_string(g.resolution) + "," + format_double(-g.half_width) +
              "," + format_double(g.half_width) + "," + format_double(g.retained_mass) + "\n";
    atomic_write(with_suffix(stem, ".header.csv"), header);
    if (format == PayloadFormat::csv) {
        std::string payload;
        payload.reserve(g.values.size() * 24);
        for (double v : g.values) {
            payload += format_double(v);
            payload += '\n';
        }
        atomic_write(with_suffix(stem, ".values.csv"), payload);
    } else {
        static_assert(std::endian::native == std::endian::little, "binary payload assumes little-endian host");
        std::string payload(reinterpret_cast<const char *>(g.values.data()), g.values.size() * sizeof(double));
        atomic_write(with_suffix(stem, ".values.bin"), payload);
    }
}

inline GridDensity read_grid_density(const std::filesystem::path &stem) {
    const std::string header = read_file(with_suffix(stem, ".header.csv"));
    std::istringstream in(header);
    std::string names, row;
    std::getline(in, names);
    std::getline(in, row);
    detail::require(names == "dims,resolution,support_lo,support_hi,retained_mass",
                    stem.string() + ".header.csv: unexpected columns");
    std::vector<std::string> cells;
    std::stringstream rs(row);
    for (std::string c; std::getline(rs, c, ',');) {
        cells.push_back(c);
    }
    detail::require(cells.size() == 5, stem.string() + ".header.csv: expected 5 fields");
    GridDensity g;
    g.dims = std::stoi(cells[0]);
    g.resolution = std::stoi(cells[1]);
    const double lo = std::stod(cells[2]), hi = std::stod(cells[3]);
    detail::require(lo == -hi && hi > 0.0, stem.string() + ".header.csv: support must be a symmetric box");
    g.half_width = hi;
    g.retained_mass = std::stod(cells[4]);
    detail::require(g.dims >= 1 && g.resolution >= 1, stem.string() + ".header.csv: invalid dims/resolution");
    g.cell_volume = std::pow(2.0 / g.resolution, g.dims);
    const auto bin = with_suffix(stem, ".values.bin");
    if (std::filesystem::exists(bin)) {
        const std::string payload = read_file(bin);
        detail::require(payload.size() % sizeof(double) == 0, bin.string() + ": truncated payload");
        g.values.resize(payload.size() / sizeof(double));
        std::memcpy(g.values.data(), payload.data(), payload.size());
    } else {
        std::istringstream vs(read_file(with_suffix(stem, ".values.csv")));
        for (std::string line; std::getline(vs, line);) {
            if (!line.empty()) {
                g.values.push_back(std::stod(line));
            }
        }
    }
    g.validate();
    return g;
}

// ---------------------------------------------------------------------------
// Model file
// ---------------------------------------------------------------------------

inline json binding_json(const Binding &b) {
    switch (b.kind) {
    case BindingKind::constant:
        return {{"type", "constant"}, {"angle", b.angle}};
    case BindingKind::trainable:
        return {{"type", "trainable"}, {"weight", b.weight}};
    case BindingKind::data_product:
        return {{"type", "data_product"}, {"data", b.data}, {"weight", b.weight}};
    }
    return {};
}

inline Binding binding_from_json(const json &j) {
    const std::string t = j.at("type").get<std::string>();
    if (t == "constant") {
        return Binding::constant(j.at("angle").get<double>());
    }
    if (t == "trainable") {
        return Binding::trainable(j.at("weight").get<int>());
    }
    if (t == "data_product") {
        return Binding::data_product(j.at("data").get<int>(), j.at("weight").get<int>());
    }
    throw ValidationError("model file: unknown binding type '" + t + "'");
}

inline json circuit_json(const ParameterizedCircuit &c) {
    json gates = json::array();
    for (const auto &g : c.gates()) {
        json jg{{"kind", to_string(g.kind)}, {"targets", g.targets}};
        if (g.is_rotation()) {
            jg["binding"] = binding_json(g.binding);
        }
        if (g.kind == GateKind::FIXED_1Q) {
            json m = json::array();
            for (const auto &z : g.matrix) {
                m.push_back({z.real(), z.imag()});
            }
            jg["matrix"] = m;
        }
        gates.push_back(jg);
    }
    return {{"n_qubits", c.n_qubits()}, {"gates", gates}};
}

inline ParameterizedCircuit circuit_from_json(const json &j) {
    ParameterizedCircuit c(j.at("n_qubits").get<int>());
    for (const auto &jg : j.at("gates")) {
        GateOp op;
        op.kind = gate_kind_from_string(jg.at("kind").get<std::string>());
        op.targets = jg.at("targets").get<std::vector<int>>();
        if (op.is_rotation()) {
            op.binding = binding_from_json(jg.at("binding"));
        }
        if (op.kind == GateKind::FIXED_1Q) {
            const auto &m = jg.at("matrix");
            detail::require(m.size() == 4, "model file: FIXED_1Q matrix needs 4 entries");
            for (std::size_t k = 0; k < 4; ++k) {
                op.matrix[k] = cplx(m[k][0].get<double>(), m[k][1].get<double>());
            }
        }
        c.push(std::move(op));
    }
    return c;
}

inline json observable_json(const Observable &o) {
    if (o.is_pauli()) {
        json terms = json::array();
        for (const auto &t : o.pauli_terms()) {
            terms.push_back({{"coeff", t.coeff}, {"paulis", t.paulis}});
        }
        return {{"type", "pauli"}, {"n_qubits", o.n_qubits()}, {"terms", terms}};
    }
    const auto &m = o.dense_matrix();
    json re = json::array(), im = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json rr = json::array(), ir = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
            rr.push_back(m(i, k).real());
            ir.push_back(m(i, k).imag());
        }
        re.push_back(rr);
        im.push_back(ir);
    }
    return {{"type", "dense"}, {"n_qubits", o.n_qubits()}, {"real", re}, {"imag", im}};
}

inline Observable observable_from_json(const json &j) {
    const std::string t = j.at("type").get<std::string>();
    if (t == "pauli") {
        Observable::PauliSum terms;
        for (const auto &jt : j.at("terms")) {
            terms.push_back({jt.at("coeff").get<double>(), jt.at("paulis").get<std::string>()});
        }
        return Observable::pauli(j.at("n_qubits").get<int>(), std::move(terms));
    }
    if (t == "dense") {
        const auto &re = j.at("real");
        const auto &im = j.at("imag");
        const auto d = static_cast<Eigen::Index>(re.size());
        DenseMatrix m(d, d);
        for (Eigen::Index i = 0; i < d; ++i) {
            for (Eigen::Index k = 0; k < d; ++k) {
                m(i, k) = cplx(re[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)].get<double>(),
                               im[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)].get<double>());
            }
        }
        return Observable::dense(std::move(m));
    }
    throw ValidationError("model file: unknown observable type '" + t + "'");
}

inline json density_json(const GridDensity &g) {
    return {{"dims", g.dims},           {"resolution", g.resolution},       {"half_width", g.half_width},
            {"retained_mass", g.retained_mass}, {"values", g.values}};
}

inline GridDensity density_from_json(const json &j) {
    GridDensity g;
    g.dims = j.at("dims").get<int>();
    g.resolution = j.at("resolution").get<int>();
    g.half_width = j.at("half_width").get<double>();
    g.retained_mass = j.at("retained_mass").get<double>();
    g.values = j.at("values").get<std::vector<double>>();
    g.cell_volume = std::pow(2.0 / g.resolution, g.dims);
    g.validate();
    return g;
}

inline json model_json(const EvsModel &m, const std::string &config_hash = {}) {
    json j;
    j["format"] = "evs-model";
    j["version"] = kModelFormatVersion;
    j["kind"] = to_string(m.kind);
    j["id"] = m.id;
    j["n_qubits"] = m.n_qubits;
    j["input_dim"] = m.input_dim;
    j["output_dim"] = m.output_dim;
    j["layers"] = m.layers;
    j["prep_mode"] = to_string(m.prep_mode);
    j["weights"] = m.weights;
    if (m.kind == EncoderKind::circuit || m.kind == EncoderKind::product) {
        j["circuit"] = circuit_json(m.circuit);
    }
    json obs = json::array();
    for (const auto &o : m.observables) {
        obs.push_back(observable_json(o));
    }
    j["observables"] = obs;
    if (m.density) {
        j["density"] = density_json(*m.density);
    }
    j["fit_losses"] = m.fit_losses;
    if (!config_hash.empty()) {
        j["config_hash"] = config_hash;
    }
    return j;
}

inline EvsModel model_from_json(const json &j) {
    try {
        detail::require(j.value("format", std::string()) == "evs-model", "model file: not an evs-model document");
        const int version = j.at("version").get<int>();
        detail::require(version == kModelFormatVersion,
                        "model file: unsupported version " + std::to_string(version));
        EvsModel m;
        m.kind = encoder_kind_from_string(j.at("kind").get<std::string>());
        m.id = j.value("id", std::string());
        m.n_qubits = j.at("n_qubits").get<int>();
        m.input_dim = j.at("input_dim").get<int>();
        m.output_dim = j.at("output_dim").get<int>();
        m.layers = j.value("layers", 0);
        m.prep_mode = prep_mode_from_string(j.value("prep_mode", std::string("exact_injection")));
        m.weights = j.at("weights").get<std::vector<double>>();
        if (j.contains("circuit")) {
            m.circuit = circuit_from_json(j.at("circuit"));
        }
        for (const auto &jo : j.at("observables")) {
            m.observables.push_back(observable_from_json(jo));
        }
        if (j.contains("density")) {
            m.density = density_from_json(j.at("density"));
            m.map = build_triangular_map(*m.density);
        }
        m.fit_losses = j.value("fit_losses", std::vector<double>{});
        m.validate();
        return m;
    } catch (const json::exception &e) {
        throw ValidationError(std::string("model file: ") + e.what());
    }
}

inline void save_model(const EvsModel &m, const std::filesystem::path &path, const std::string &config_hash = {}) {
    atomic_write(path, model_json(m, config_hash).dump(1) + "\n");
}

inline EvsModel load_model(const std::filesystem::path &path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error &e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
    return model_from_json(j);
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline json report_json(const MetricReport &r) {
    return {{"name", r.name}, {"value", r.value}, {"N_a", r.n_a}, {"N_b", r.n_b}, {"params", r.params}};
}

inline json report_json(const PrimaryMappingReport &r) {
    json cov = json::array();
    for (Eigen::Index i = 0; i < r.covariance.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < r.covariance.cols(); ++k) {
            row.push_back(r.covariance(i, k));
        }
        cov.push_back(row);
    }
    return {{"n_qubits", r.n_qubits},   {"samples", r.samples},       {"numerical_rank", r.numerical_rank},
            {"threshold", r.threshold}, {"absolute_floor", r.absolute_floor}, {"eigenvalues", r.eigenvalues},
            {"covariance", cov}};
}

/// Infinite bounds are written as null.
inline json report_json(const FeasibilityReport &r) {
    const auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    json checks = json::array();
    for (const auto &c : r.checks) {
        checks.push_back(
            {{"name", c.name}, {"passed", c.passed}, {"bound", num(c.bound)}, {"observed", num(c.observed)}, {"detail", c.detail}});
    }
    json obs = json::array();
    for (const auto &o : r.observables) {
        obs.push_back({{"lambda_min", o.spectrum.lambda_min},
                       {"lambda_max", o.spectrum.lambda_max},
                       {"spectral_norm", o.spectrum.spectral_norm},
                       {"capital_lambda", o.spectrum.capital_lambda},
                       {"spectral_range_ok", o.spectral_range_ok},
                       {"required_n", num(o.required_n)},
                       {"required_n_norm_based", num(o.required_n_norm_based)}});
    }
    return {{"feasible", r.feasible()},
            {"n_qubits", r.n_qubits},
            {"output_dim", r.output_dim},
            {"epsilon", r.epsilon},
            {"gamma", r.gamma},
            {"n_min", num(r.n_min)},
            {"q_star", r.q_star},
            {"q_grid", r.q_grid},
            {"binary_entropy_bits", r.entropies},
            {"coefficients", r.coefficients},
            {"observables", obs},
            {"checks", checks}};
}

inline std::string fourier_to_csv(const FourierSpectrum &s, const std::vector<std::string> &comments = {}) {
    std::string out;
    for (const auto &c : comments) {
        out += "# " + c + "\n";
    }
    for (int d = 0; d < s.dims; ++d) {
        out += "k" + std::to_string(d + 1) + ",";
    }
    out += "re,im,abs\n";
    for (std::size_t f = 0; f < s.coefficients.size(); ++f) {
        for (int kd : s.frequency(f)) {
            out += std::to_string(kd) + ",";
        }
        const auto c = s.coefficients[f];
        out += format_double(c.real()) + "," + format_double(c.imag()) + "," + format_double(std::abs(c)) + "\n";
    }
    return out;
}

} // namespace evs::io
