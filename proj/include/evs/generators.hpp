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
 * Expectation-value sampler models and the universal constructions:
 *
 *  - product encoding: one re-uploading qubit per output coordinate,
 *    observable Z' = diag(-1, +1) on that qubit (unit spectral norm);
 *  - dense encoding: ceil(log2(M + 1)) qubits prepared in
 *    psi(y) = sum_m sqrt((y_m + 1) / 2M) |m> + residual |M>, observables
 *    P_m = 2M |m><m| - I, so that <P_m> = y_m;
 *  - simplex encoding: log2(M) qubits with amplitudes sqrt(y_m) and raw
 *    basis projectors as observables.
 *
 * Basis labels are 0-based; the dense residual amplitude sits on index M.
 */

#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evs/error.hpp"
#include "evs/quantum_core.hpp"
#include "evs/reuploading.hpp"
#include "evs/rng.hpp"
#include "evs/target_maps.hpp"

namespace evs {

enum class EncoderKind { circuit, product, dense, simplex };
enum class PrepMode { exact_injection, rotation_cascade };

inline const char *to_string(EncoderKind k) {
    switch (k) {
    case EncoderKind::circuit:
        return "circuit";
    case EncoderKind::product:
        return "product";
    case EncoderKind::dense:
        return "dense";
    case EncoderKind::simplex:
        return "simplex";
    }
    return "?";
}

inline EncoderKind encoder_kind_from_string(const std::string &s) {
    for (EncoderKind k : {EncoderKind::circuit, EncoderKind::product, EncoderKind::dense, EncoderKind::simplex}) {
        if (s == to_string(k)) {
            return k;
        }
    }
    throw ValidationError("unknown encoder '" + s + "' (allowed: circuit, product, dense, simplex)");
}

inline const char *to_string(PrepMode m) {
    return m == PrepMode::exact_injection ? "exact_injection" : "rotation_cascade";
}

inline PrepMode prep_mode_from_string(const std::string &s) {
    if (s == "exact_injection") {
        return PrepMode::exact_injection;
    }
    if (s == "rotation_cascade") {
        return PrepMode::rotation_cascade;
    }
    throw ValidationError("unknown prep mode '" + s + "' (allowed: exact_injection, rotation_cascade)");
}

// ---------------------------------------------------------------------------
// State preparation
// ---------------------------------------------------------------------------

/// Uniformly controlled RY cascade preparing a real nonnegative state.
///
/// Qubit k is rotated by RY(alpha_{k,p}) conditioned on the value p of
/// qubits 0..k-1, with alpha = 2 atan2(sqrt(mass of p1), sqrt(mass of p0)).
/// Each multiplexed rotation is expanded into 2^k RY gates and 2^k CNOTs
/// along a Gray code, with angles theta_i = 2^-k sum_p (-1)^{p . g(i)} alpha_p.
inline ParameterizedCircuit rotation_cascade_circuit(int n_qubits, std::span<const double> amplitudes) {
    const std::size_t d = std::size_t{1} << n_qubits;
    detail::require(amplitudes.size() == d, "rotation_cascade: amplitude count must be 2^n");
    std::vector<double> prob(d);
    for (std::size_t i = 0; i < d; ++i) {
        prob[i] = amplitudes[i] * amplitudes[i];
    }
    ParameterizedCircuit c(n_qubits);
    for (int k = 0; k < n_qubits; ++k) {
        const std::size_t groups = std::size_t{1} << k;
        const std::size_t block = d >> k; // basis states sharing a k-bit prefix
        std::vector<double> alpha(groups);
        for (std::size_t p = 0; p < groups; ++p) {
            double m0 = 0.0, m1 = 0.0;
            for (std::size_t j = 0; j < block / 2; ++j) {
                m0 += prob[p * block + j];
                m1 += prob[p * block + block / 2 + j];
            }
            alpha[p] = 2.0 * std::atan2(std::sqrt(m1), std::sqrt(m0));
        }
        if (k == 0) {
            c.ry(0, Binding::constant(alpha[0]));
            continue;
        }
        for (std::size_t i = 0; i < groups; ++i) {
            const std::size_t gi = i ^ (i >> 1U);
            double theta = 0.0;
            for (std::size_t p = 0; p < groups; ++p) {
                theta += detail::parity_sign(p & gi) * alpha[p];
            }
            c.ry(k, Binding::constant(theta / static_cast<double>(groups)));
            const std::size_t next = (i + 1) % groups;
            const std::size_t flip = gi ^ (next ^ (next >> 1U));
            // bit b of the prefix value belongs to qubit k - 1 - b
            const int control = k - 1 - std::countr_zero(flip);
            c.cnot(control, k);
        }
    }
    return c;
}

struct StatePrepProgram {
    int n_qubits = 1;
    PrepMode mode = PrepMode::exact_injection;
    std::vector<double> amplitudes;
    ParameterizedCircuit cascade; // rotation_cascade only

    [[nodiscard]] StateVector run() const {
        if (mode == PrepMode::exact_injection) {
            std::vector<cplx> a(amplitudes.begin(), amplitudes.end());
            return StateVector::from_amplitudes(n_qubits, std::move(a), 1e-9);
        }
        return run_circuit(cascade, {}, {});
    }
};

inline StatePrepProgram amplitude_prep(std::span<const double> amplitudes, PrepMode mode) {
    detail::require(!amplitudes.empty() && std::has_single_bit(amplitudes.size()) && amplitudes.size() >= 2,
                    "amplitude_prep: amplitude count must be a power of two >= 2");
    double norm2 = 0.0;
    for (double a : amplitudes) {
        detail::require(std::isfinite(a), "amplitude_prep: non-finite amplitude");
        detail::require(a >= 0.0, "amplitude_prep: amplitudes must be nonnegative");
        norm2 += a * a;
    }
    detail::require(std::abs(std::sqrt(norm2) - 1.0) <= 1e-9, "amplitude_prep: amplitudes must have unit norm");
    StatePrepProgram p;
    p.n_qubits = std::countr_zero(amplitudes.size());
    p.mode = mode;
    p.amplitudes.assign(amplitudes.begin(), amplitudes.end());
    if (mode == PrepMode::rotation_cascade) {
        p.cascade = rotation_cascade_circuit(p.n_qubits, amplitudes);
    }
    return p;
}

/// Qubits used by the dense encoding of M outputs.
inline int dense_qubit_count(int output_dim) {
    detail::require(output_dim >= 1, "dense encoder: M must be positive");
    return std::bit_width(static_cast<unsigned>(output_dim)); // ceil(log2(M + 1))
}

/// Amplitudes sqrt((y_m + 1) / 2M) on |m>, m < M, and the residual on |M>.
inline std::vector<double> dense_amplitudes(std::span<const double> y, int n_qubits) {
    const std::size_t m = y.size();
    const std::size_t d = std::size_t{1} << n_qubits;
    detail::require(m + 1 <= d, "dense_amplitudes: too few qubits for M + 1 basis states");
    std::vector<double> a(d, 0.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double z2 = std::max(0.0, (y[i] + 1.0) / (2.0 * static_cast<double>(m)));
        a[i] = std::sqrt(z2);
        sum += z2;
    }
    a[m] = std::sqrt(std::max(0.0, 1.0 - sum));
    return a;
}

/// P_m = 2M |m><m| - I on n qubits.
inline Observable dense_observable(int n_qubits, int output_dim, int m) {
    return Observable::basis_projector(n_qubits, static_cast<std::size_t>(m), 2.0 * output_dim, -1.0);
}

/// Completes the first M - 1 simplex coordinates (canonical [-1, 1] grid
/// coordinates, u = (y + 1) / 2) to a point on the unit simplex.
inline std::vector<double> simplex_point(std::span<const double> y_head) {
    std::vector<double> p(y_head.size() + 1);
    double sum = 0.0;
    for (std::size_t i = 0; i < y_head.size(); ++i) {
        p[i] = std::max(0.0, (y_head[i] + 1.0) / 2.0);
        sum += p[i];
    }
    p.back() = std::max(0.0, 1.0 - sum);
    sum += p.back();
    for (auto &v : p) {
        v /= sum;
    }
    return p;
}

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

/// (U_theta, O, p_X) with p_X uniform on [0, 1]^input_dim.
struct EvsModel {
    EncoderKind kind = EncoderKind::circuit;
    int n_qubits = 1;
    int input_dim = 1;
    int output_dim = 1;
    ParameterizedCircuit circuit;
    std::vector<double> weights;
    std::vector<Observable> observables;
    PrepMode prep_mode = PrepMode::exact_injection;
    /// Target grid (dense / simplex encoders); the classical map is rebuilt from it.
    std::optional<GridDensity> density;
    std::optional<TriangularMap> map;
    int layers = 0;
    std::vector<double> fit_losses;
    std::string id;

    void validate() const {
        detail::require(static_cast<int>(observables.size()) == output_dim,
                        "EvsModel: observable count must equal output_dim");
        detail::require(input_dim >= 1, "EvsModel: input dimension must be positive");
        for (const auto &o : observables) {
            detail::require(o.n_qubits() == n_qubits, "EvsModel: observable qubit count mismatch");
        }
        if (kind == EncoderKind::circuit || kind == EncoderKind::product) {
            detail::require(circuit.n_qubits() == n_qubits, "EvsModel: circuit qubit count mismatch");
            detail::require(circuit.num_weights() <= weights.size(), "EvsModel: missing weights");
            detail::require(circuit.data_dim() <= static_cast<std::size_t>(input_dim),
                            "EvsModel: circuit reads more inputs than input_dim");
        } else {
            detail::require(map.has_value(), "EvsModel: encoder requires a classical map");
            detail::require(map->dims() == input_dim, "EvsModel: map dimension must equal input_dim");
        }
    }

    /// The classical pre-image y(x) for map-based encoders.
    [[nodiscard]] std::vector<double> classical_output(std::span<const double> x) const {
        detail::require(map.has_value(), "EvsModel: no classical map");
        std::vector<double> y(static_cast<std::size_t>(map->dims()));
        map->forward_into(x, y);
        if (kind == EncoderKind::simplex) {
            return simplex_point(y);
        }
        return y;
    }

    [[nodiscard]] std::vector<double> amplitudes_for(std::span<const double> x) const {
        const auto y = classical_output(x);
        if (kind == EncoderKind::dense) {
            return dense_amplitudes(y, n_qubits);
        }
        std::vector<double> a(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) {
            a[i] = std::sqrt(y[i]);
        }
        return a;
    }

    /// U(x)|0> for an input x in [0, 1]^input_dim.
    [[nodiscard]] StateVector prepare(std::span<const double> x) const {
        detail::require(x.size() == static_cast<std::size_t>(input_dim), "EvsModel: input dimension mismatch");
        if (kind == EncoderKind::circuit || kind == EncoderKind::product) {
            StateVector s(n_qubits);
            apply_circuit(circuit, weights, x, s);
            return s;
        }
        return amplitude_prep(amplitudes_for(x), prep_mode).run();
    }
};

/// Wraps an arbitrary circuit and observable list.
inline EvsModel make_circuit_model(ParameterizedCircuit circuit, std::vector<double> weights,
                                   std::vector<Observable> observables, int input_dim) {
    EvsModel m;
    m.kind = EncoderKind::circuit;
    m.n_qubits = circuit.n_qubits();
    m.input_dim = input_dim;
    m.output_dim = static_cast<int>(observables.size());
    m.circuit = std::move(circuit);
    m.weights = std::move(weights);
    m.observables = std::move(observables);
    m.id = "circuit:n=" + std::to_string(m.n_qubits) + ":M=" + std::to_string(m.output_dim);
    m.validate();
    std::vector<double> probe(static_cast<std::size_t>(input_dim), 0.0);
    m.circuit.validate(m.weights, probe);
    return m;
}

/// Target function of product-encoder coordinate m, tabulated over its
/// triangular inputs x_0..x_m.
inline GridFunction product_coordinate_target(const TriangularMap &map, int m, int points_per_dim) {
    const auto dims = static_cast<std::size_t>(map.dims());
    return tabulate(
        [&](std::span<const double> xs) {
            std::vector<double> x(dims, 0.0), y(dims, 0.0);
            std::copy(xs.begin(), xs.end(), x.begin());
            map.forward_into(x, y);
            return y[static_cast<std::size_t>(m)];
        },
        m + 1, points_per_dim);
}

inline EvsModel build_product_encoder(const GridDensity &density, int layers, const FitConfig &cfg) {
    density.validate();
    detail::require(layers >= 1, "build_product_encoder: L must be positive");
    cfg.validate();
    const int m_dim = density.dims;
    detail::require(m_dim <= kMaxStateQubits, "build_product_encoder: M exceeds the simulator qubit limit");
    const TriangularMap map = build_triangular_map(density);
    EvsModel model;
    model.kind = EncoderKind::product;
    model.n_qubits = m_dim;
    model.input_dim = m_dim;
    model.output_dim = m_dim;
    model.layers = layers;
    model.circuit = ParameterizedCircuit(m_dim);
    const Observable zprime = amplitude_z_observable();
    for (int m = 0; m < m_dim; ++m) {
        const ReuploadingCircuit rc = build_reuploading(m + 1, layers);
        const GridFunction target = product_coordinate_target(map, m, cfg.grid_points_per_dim);
        FitConfig c = cfg;
        c.seed = rng::derive_seed(cfg.seed, static_cast<std::uint64_t>(m));
        FitResult fit;
        try {
            fit = fit_to_function(rc, target, zprime, c);
        } catch (const RuntimeError &e) {
            throw RuntimeError("build_product_encoder: coordinate " + std::to_string(m) + ": " + e.what());
        }
        std::vector<int> data(static_cast<std::size_t>(m + 1));
        for (int j = 0; j <= m; ++j) {
            data[static_cast<std::size_t>(j)] = j;
        }
        append_reuploading_layers(model.circuit, m, data, static_cast<int>(model.weights.size()), layers);
        model.weights.insert(model.weights.end(), fit.weights.begin(), fit.weights.end());
        model.observables.push_back(amplitude_z_observable(m_dim, m));
        model.fit_losses.push_back(fit.final_loss);
    }
    model.id = "product:M=" + std::to_string(m_dim) + ":L=" + std::to_string(layers);
    model.validate();
    return model;
}

inline EvsModel build_dense_encoder(const GridDensity &density, PrepMode mode = PrepMode::exact_injection) {
    density.validate();
    const int m_dim = density.dims;
    EvsModel model;
    model.kind = EncoderKind::dense;
    model.n_qubits = dense_qubit_count(m_dim);
    detail::require(model.n_qubits <= kMaxDenseQubits, "build_dense_encoder: M too large for dense observables");
    model.input_dim = m_dim;
    model.output_dim = m_dim;
    model.prep_mode = mode;
    model.density = density;
    model.map = build_triangular_map(density);
    for (int m = 0; m < m_dim; ++m) {
        model.observables.push_back(dense_observable(model.n_qubits, m_dim, m));
    }
    model.id = "dense:M=" + std::to_string(m_dim);
    model.validate();
    return model;
}

/// Mass of a simplex-coordinate grid lying in cells entirely off the simplex.
inline double off_simplex_mass(const GridDensity &density) {
    double mass = 0.0;
    for (std::size_t flat = 0; flat < density.values.size(); ++flat) {
        if (density.values[flat] == 0.0) {
            continue;
        }
        std::size_t lower = 0;
        for (auto i : density.unflatten(flat)) {
            lower += i;
        }
        if (lower >= static_cast<std::size_t>(density.resolution)) {
            mass += density.values[flat] * density.cell_volume;
        }
    }
    return mass;
}

/// Grid over the first M - 1 simplex coordinates u in [0, 1]; the pdf is
/// evaluated in u-coordinates.
inline GridDensity build_simplex_density(const PointFunction &pdf_u, int output_dim, int resolution) {
    detail::require(output_dim >= 2, "simplex density: M must be >= 2");
    return build_grid_density(
        [&](std::span<const double> y) {
            std::vector<double> u(y.size());
            for (std::size_t i = 0; i < y.size(); ++i) {
                u[i] = (y[i] + 1.0) / 2.0;
            }
            return pdf_u(u);
        },
        output_dim - 1, resolution);
}

/// `density` covers the first M - 1 simplex coordinates (see build_simplex_density).
inline EvsModel build_simplex_encoder(const GridDensity &density, int output_dim,
                                      PrepMode mode = PrepMode::exact_injection) {
    density.validate();
    detail::require(output_dim >= 2 && std::has_single_bit(static_cast<unsigned>(output_dim)),
                    "build_simplex_encoder: M must be a power of two >= 2");
    detail::require(density.dims == output_dim - 1, "build_simplex_encoder: density must have M - 1 dimensions");
    detail::require(off_simplex_mass(density) <= 1e-6,
                    "build_simplex_encoder: density mass off the simplex exceeds 1e-6");
    EvsModel model;
    model.kind = EncoderKind::simplex;
    model.n_qubits = std::countr_zero(static_cast<unsigned>(output_dim));
    model.input_dim = output_dim - 1;
    model.output_dim = output_dim;
    model.prep_mode = mode;
    model.density = density;
    model.map = build_triangular_map(density);
    for (int m = 0; m < output_dim; ++m) {
        model.observables.push_back(Observable::basis_projector(model.n_qubits, static_cast<std::size_t>(m)));
    }
    model.id = "simplex:M=" + std::to_string(output_dim);
    model.validate();
    return model;
}

} // namespace evs
