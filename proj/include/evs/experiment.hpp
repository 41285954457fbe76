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
 * Batch driver behind the command-line tool.
 *
 * | command         | artifact                                   |
 * |-----------------|--------------------------------------------|
 * | fit             | model.json                                 |
 * | sample          | samples.csv + samples.csv.meta.json        |
 * | w1              | w1.json                                    |
 * | analyze-rank    | rank.json + rank_eigenvalues.csv           |
 * | analyze-fourier | fourier.csv                                |
 * | check           | check.json                                 |
 *
 * Exit status: 0 success (including an infeasible check verdict),
 * 1 validation error, 2 runtime failure.
 */

#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "evs/analysis.hpp"
#include "evs/config.hpp"
#include "evs/densities.hpp"
#include "evs/generators.hpp"
#include "evs/io.hpp"
#include "evs/metrics.hpp"
#include "evs/reuploading.hpp"
#include "evs/rng.hpp"
#include "evs/samplers.hpp"
#include "evs/target_maps.hpp"

namespace evs {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitRuntime = 2 };

struct ExecutionResult {
    int exit_code = kExitOk;
    std::vector<std::filesystem::path> artifacts;
    std::string message;
};

/// Grid density described by a target spec.
inline GridDensity build_target(const TargetSpec &t) {
    const auto res = [&](int dims) { return t.resolution > 0 ? t.resolution : default_resolution(dims); };
    if (t.family == "uniform1d" || t.family == "uniform") {
        return build_grid_density(densities::uniform(), t.dims, res(t.dims));
    }
    if (t.family == "bimodal1d") {
        return build_grid_density(densities::bimodal().pdf(), 1, res(1));
    }
    if (t.family == "gaussian") {
        return truncate_density(densities::standard_normal(), t.dims, t.truncation, t.offset, res(t.dims));
    }
    if (t.family == "gaussian2d") {
        return truncate_density(densities::correlated_gaussian_2d(t.rho), 2, t.truncation, t.offset, res(2));
    }
    if (t.family == "dirichlet") {
        const int m = static_cast<int>(t.alpha.size());
        return build_simplex_density(densities::dirichlet(t.alpha), m, res(m - 1));
    }
    if (t.family == "file") {
        return io::read_grid_density(t.file);
    }
    throw ValidationError("target.family: unknown value '" + t.family + "'");
}

inline EvsModel build_model(const ExperimentConfig &c) {
    detail::require(c.target && c.encoder, "target and encoder sections are required to build a model");
    const GridDensity density = build_target(*c.target);
    EvsModel m;
    switch (c.encoder->kind) {
    case EncoderKind::product: {
        FitConfig fit = c.fit;
        fit.seed = c.seed;
        m = build_product_encoder(density, c.encoder->layers, fit);
        break;
    }
    case EncoderKind::dense:
        m = build_dense_encoder(density, c.encoder->prep);
        break;
    case EncoderKind::simplex:
        m = build_simplex_encoder(density, static_cast<int>(c.target->alpha.size()), c.encoder->prep);
        break;
    case EncoderKind::circuit:
        throw ValidationError("encoder.kind: circuit models are not built from a target");
    }
    m.id += ":" + c.hash();
    return m;
}

/// Weights uniform in [-pi, pi] keyed by the seed.
inline std::vector<double> random_weights(std::size_t count, std::uint64_t seed) {
    std::vector<double> w(count);
    for (std::size_t i = 0; i < count; ++i) {
        w[i] = std::numbers::pi * (2.0 * rng::uniform(seed, rng::Stream::init, i) - 1.0);
    }
    return w;
}

namespace detail {

inline EvsModel load_or_build(const ExperimentConfig &c, const std::filesystem::path &model_path) {
    return model_path.empty() ? build_model(c) : io::load_model(model_path);
}

inline SpectralSummary check_spectrum(const CheckSpec &k) {
    if (!k.eigenvalues.empty()) {
        SpectralSummary s;
        s.lambda_min = *std::min_element(k.eigenvalues.begin(), k.eigenvalues.end());
        s.lambda_max = *std::max_element(k.eigenvalues.begin(), k.eigenvalues.end());
        s.spectral_norm = std::max(std::abs(s.lambda_min), std::abs(s.lambda_max));
        s.capital_lambda = -s.lambda_min * s.lambda_max;
        return s;
    }
    std::string p = k.observable;
    if (p.empty()) {
        p = "Z" + std::string(static_cast<std::size_t>(k.n_qubits - 1), 'I');
    }
    // A Pauli string has spectrum {-1, 1} unless it is the identity.
    const bool identity = p.find_first_not_of('I') == std::string::npos;
    SpectralSummary s;
    s.lambda_min = identity ? 1.0 : -1.0;
    s.lambda_max = 1.0;
    s.spectral_norm = 1.0;
    s.capital_lambda = -s.lambda_min * s.lambda_max;
    return s;
}

inline ExecutionResult run_fit(const ExperimentConfig &c, const std::filesystem::path &out) {
    const EvsModel m = build_model(c);
    const auto path = out / "model.json";
    io::save_model(m, path, c.hash());
    return {kExitOk, {path}, "model " + m.id};
}

inline ExecutionResult run_sample(const ExperimentConfig &c, const std::filesystem::path &out) {
    const SampleSpec &s = *c.sample;
    const EvsModel m = load_or_build(c, s.model);
    SampleSet samples;
    switch (s.mode) {
    case SampleMode::exact:
        samples = sample_exact(m, s.n, c.seed);
        break;
    case SampleMode::shots:
        samples = sample_with_shots(m, s.n, ShotConfig{s.shots}, c.seed);
        break;
    case SampleMode::gaussian:
        samples = gaussian_noise_model(sample_exact(m, s.n, c.seed), s.epsilon, c.seed);
        break;
    case SampleMode::pushforward:
        throw ValidationError("sample.mode: pushforward is not a model sampling mode");
    }
    const auto path = out / s.output;
    io::write_samples(samples, path, c.hash());
    return {kExitOk, {path, io::metadata_path(path)}, std::to_string(samples.rows) + " samples"};
}

inline ExecutionResult run_w1(const ExperimentConfig &c, const std::filesystem::path &out) {
    const W1Spec &w = *c.w1;
    const SampleSet a = io::read_samples(w.a);
    const SampleSet b = io::read_samples(w.b);
    require(a.dims == b.dims, "w1: sample files have different dimensions");
    std::string method = w.method;
    if (method == "auto") {
        method = a.dims == 1 ? "1d" : (a.rows == b.rows && a.rows <= kMaxExactW1 ? "exact" : "sliced");
    }
    MetricReport r;
    r.n_a = a.rows;
    r.n_b = b.rows;
    if (method == "1d") {
        require(a.dims == 1, "w1.method: 1d requires one-dimensional samples");
        r.name = "w1_1d";
        r.value = w1_1d(a.values, b.values);
    } else if (method == "exact") {
        r.name = "w1_exact";
        r.value = w1_exact(a, b);
    } else {
        r.name = "w1_sliced";
        r.value = w1_sliced(a, b, w.projections, c.seed);
        r.params["projections"] = w.projections;
        r.params["seed"] = static_cast<double>(c.seed);
    }
    auto j = io::report_json(r);
    j["config_hash"] = c.hash();
    const auto path = out / w.output;
    io::atomic_write(path, j.dump(2) + "\n");
    return {kExitOk, {path}, r.name + " = " + io::format_double(r.value)};
}

struct AnalysisModel {
    ParameterizedCircuit circuit;
    std::vector<double> weights;
    Observable observable;
    int input_dim = 1;
};

inline AnalysisModel analysis_model(const ExperimentConfig &c) {
    const AnalyzeSpec a = c.analyze.value_or(AnalyzeSpec{});
    if (a.source == "model") {
        EvsModel m = io::load_model(a.model);
        require(m.kind == EncoderKind::circuit || m.kind == EncoderKind::product,
                "analyze.model: only circuit-based models can be analyzed");
        require(a.output < m.output_dim, "analyze.output: exceeds the model output dimension");
        return {m.circuit, m.weights, m.observables[static_cast<std::size_t>(a.output)], m.input_dim};
    }
    const ReuploadingCircuit rc = build_reuploading(a.data_dim, a.layers);
    auto w = random_weights(rc.num_weights(), c.seed);
    if (a.integer_spectrum) {
        for (int l = 0; l < a.layers; ++l) {
            for (int m = 1; m <= a.data_dim; ++m) {
                w[rc.weight_index(m, l)] = 1.0;
            }
        }
    }
    return {rc.circuit(), w, amplitude_z_observable(), a.data_dim};
}

inline ExecutionResult run_rank(const ExperimentConfig &c, const std::filesystem::path &out) {
    const AnalyzeSpec a = c.analyze.value_or(AnalyzeSpec{});
    const AnalysisModel am = analysis_model(c);
    const PrimaryMappingReport r = primary_covariance(am.circuit, am.weights, a.samples, c.seed, a.threshold);
    auto j = io::report_json(r);
    j["config_hash"] = c.hash();
    const auto path = out / "rank.json";
    const auto ev_path = out / "rank_eigenvalues.csv";
    io::atomic_write(path, j.dump(2) + "\n");
    std::string csv = "# config_hash=" + c.hash() + "\nindex,eigenvalue\n";
    for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
        csv += std::to_string(i) + "," + io::format_double(r.eigenvalues[i]) + "\n";
    }
    io::atomic_write(ev_path, csv);
    return {kExitOk, {path, ev_path}, "numerical rank " + std::to_string(r.numerical_rank)};
}

inline ExecutionResult run_fourier(const ExperimentConfig &c, const std::filesystem::path &out) {
    const AnalyzeSpec a = *c.analyze;
    const AnalysisModel am = analysis_model(c);
    const int q = a.quadrature > 0 ? a.quadrature : 4 * a.cutoff + 4;
    const auto f = [&am](std::span<const double> x) {
        StateVector s(am.circuit.n_qubits());
        apply_circuit(am.circuit, am.weights, x, s);
        return expectation(s, am.observable);
    };
    const FourierSpectrum spec = fourier_coefficients(f, am.input_dim, a.cutoff, q);
    const auto path = out / "fourier.csv";
    io::atomic_write(path, io::fourier_to_csv(spec, {"config_hash=" + c.hash()}));
    return {kExitOk, {path}, std::to_string(spec.coefficients.size()) + " coefficients"};
}

inline ExecutionResult run_check(const ExperimentConfig &c, const std::filesystem::path &out) {
    const CheckSpec &k = *c.check;
    const SpectralSummary s = check_spectrum(k);
    const FeasibilityReport r = check_feasibility(k.n_qubits, k.output_dim, k.epsilon, {s},
                                                  k.q_grid.empty() ? default_q_grid() : k.q_grid);
    auto j = io::report_json(r);
    j["config_hash"] = c.hash();
    const auto path = out / "check.json";
    io::atomic_write(path, j.dump(2) + "\n");
    return {kExitOk, {path}, r.feasible() ? "feasible" : "infeasible"};
}

} // namespace detail

/// Runs one command and maps failures to exit codes; never throws.
inline ExecutionResult execute(const ExperimentConfig &config, const std::string &command,
                               const std::filesystem::path &out_dir, std::ostream &err = std::cerr) {
    try {
        if (auto missing = missing_for_command(config, command); !missing.empty()) {
            throw ConfigError(std::move(missing));
        }
        std::filesystem::create_directories(out_dir);
        if (command == "fit") {
            return detail::run_fit(config, out_dir);
        }
        if (command == "sample") {
            return detail::run_sample(config, out_dir);
        }
        if (command == "w1") {
            return detail::run_w1(config, out_dir);
        }
        if (command == "analyze-rank") {
            return detail::run_rank(config, out_dir);
        }
        if (command == "analyze-fourier") {
            return detail::run_fourier(config, out_dir);
        }
        return detail::run_check(config, out_dir);
    } catch (const ValidationError &e) {
        err << "error: " << e.what() << "\n";
        return {kExitValidation, {}, e.what()};
    } catch (const std::exception &e) {
        err << "runtime error: " << e.what() << "\n";
        return {kExitRuntime, {}, e.what()};
    }
}

} // namespace evs
