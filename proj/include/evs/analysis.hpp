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
 * Expressivity diagnostics: the Pauli-basis primary mapping and its
 * covariance rank, Fourier spectra of model outputs, and necessary-condition
 * feasibility checks for universal samplers.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "evs/error.hpp"
#include "evs/quantum_core.hpp"
#include "evs/rng.hpp"
#include "evs/sample_set.hpp"

namespace evs {

// ---------------------------------------------------------------------------
// Primary mapping
// ---------------------------------------------------------------------------

/// Expectations of all 4^n Pauli strings (lexicographic, identity first).
inline std::vector<double> primary_map_of_state(const StateVector &s) {
    const int n = s.n_qubits();
    detail::require(n <= kMaxDenseQubits, "primary_map_eval: n must be <= " + std::to_string(kMaxDenseQubits));
    const std::size_t count = std::size_t{1} << (2 * n);
    std::vector<double> out(count);
    out[0] = 1.0; // Tr(rho I) for a normalized state
    for (std::size_t k = 1; k < count; ++k) {
        out[k] = detail::pauli_expectation(detail::pauli_masks(pauli_string(n, k)), s.amplitudes());
    }
    return out;
}

inline std::vector<double> primary_map_eval(const ParameterizedCircuit &encoding, std::span<const double> weights,
                                            std::span<const double> x) {
    detail::require(encoding.n_qubits() <= kMaxDenseQubits,
                    "primary_map_eval: n must be <= " + std::to_string(kMaxDenseQubits));
    return primary_map_of_state(run_circuit(encoding, weights, x));
}

struct CovarianceReport {
    std::size_t dims = 0;
    std::size_t samples = 0;
    Eigen::MatrixXd covariance;
    std::vector<double> eigenvalues; // descending
    int numerical_rank = 0;
    double threshold = 1e-8;
    double absolute_floor = 1e-12;
};

struct PrimaryMappingReport : CovarianceReport {
    int n_qubits = 0;
};

/// Eigen-analysis of a covariance matrix. The rank counts eigenvalues above
/// threshold * max eigenvalue and is 0 when every eigenvalue is <= floor.
inline void analyze_covariance(CovarianceReport &r) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(r.covariance, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw RuntimeError("covariance: eigen solver did not converge");
    }
    const auto &ev = solver.eigenvalues();
    r.eigenvalues.assign(ev.data(), ev.data() + ev.size());
    std::sort(r.eigenvalues.begin(), r.eigenvalues.end(), std::greater<>());
    const double top = r.eigenvalues.empty() ? 0.0 : r.eigenvalues.front();
    r.numerical_rank = 0;
    if (top <= r.absolute_floor) {
        return;
    }
    for (double v : r.eigenvalues) {
        if (v > r.threshold * top) {
            ++r.numerical_rank;
        }
    }
}

/// Empirical covariance of the rows of a sample set.
inline CovarianceReport covariance_report(const SampleSet &s, double threshold = 1e-8) {
    detail::require(s.rows >= 2, "covariance: need at least 2 samples");
    CovarianceReport r;
    r.dims = s.dims;
    r.samples = s.rows;
    r.threshold = threshold;
    const auto d = static_cast<Eigen::Index>(s.dims);
    Eigen::MatrixXd data(static_cast<Eigen::Index>(s.rows), d);
    for (std::size_t i = 0; i < s.rows; ++i) {
        for (std::size_t j = 0; j < s.dims; ++j) {
            data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s.at(i, j);
        }
    }
    const Eigen::RowVectorXd mean = data.colwise().mean();
    const Eigen::MatrixXd centered = data.rowwise() - mean;
    r.covariance = (centered.transpose() * centered) / static_cast<double>(s.rows - 1);
    analyze_covariance(r);
    return r;
}

/// Primary mapping evaluated at N keyed uniform inputs, plus its covariance.
inline PrimaryMappingReport primary_covariance(const ParameterizedCircuit &encoding, std::span<const double> weights,
                                               std::size_t n_samples, std::uint64_t seed, double threshold = 1e-8) {
    detail::require(n_samples >= 2, "primary_covariance: N must be >= 2");
    const int n = encoding.n_qubits();
    detail::require(n <= kMaxDenseQubits, "primary_covariance: n must be <= " + std::to_string(kMaxDenseQubits));
    const std::size_t count = std::size_t{1} << (2 * n);
    const std::size_t ddim = encoding.data_dim();
    SampleSet s(n_samples, count);
    std::vector<double> x(ddim);
    for (std::size_t i = 0; i < n_samples; ++i) {
        for (std::size_t d = 0; d < ddim; ++d) {
            x[d] = rng::uniform(seed, rng::Stream::inputs, i, d);
        }
        const auto row = primary_map_eval(encoding, weights, x);
        std::copy(row.begin(), row.end(), s.values.begin() + static_cast<std::ptrdiff_t>(i * count));
    }
    PrimaryMappingReport r;
    static_cast<CovarianceReport &>(r) = covariance_report(s, threshold);
    r.n_qubits = n;
    return r;
}

// ---------------------------------------------------------------------------
// Fourier spectrum
// ---------------------------------------------------------------------------

/// Coefficients c_k, k in [-K, K]^M, row-major with the first axis most significant.
struct FourierSpectrum {
    int dims = 1;
    int cutoff = 0;
    int quadrature = 4;
    std::vector<std::complex<double>> coefficients;

    [[nodiscard]] std::size_t side() const { return static_cast<std::size_t>(2 * cutoff + 1); }

    [[nodiscard]] std::vector<int> frequency(std::size_t flat) const {
        std::vector<int> k(static_cast<std::size_t>(dims));
        for (int d = dims - 1; d >= 0; --d) {
            k[static_cast<std::size_t>(d)] = static_cast<int>(flat % side()) - cutoff;
            flat /= side();
        }
        return k;
    }

    [[nodiscard]] std::size_t index(std::span<const int> k) const {
        std::size_t flat = 0;
        for (int kd : k) {
            detail::require(std::abs(kd) <= cutoff, "FourierSpectrum: frequency beyond cutoff");
            flat = flat * side() + static_cast<std::size_t>(kd + cutoff);
        }
        return flat;
    }

    [[nodiscard]] std::complex<double> at(std::span<const int> k) const { return coefficients[index(k)]; }

    /// sum_k c_k exp(i k . x)
    [[nodiscard]] double resynthesize(std::span<const double> x) const {
        std::complex<double> acc{};
        for (std::size_t f = 0; f < coefficients.size(); ++f) {
            const auto k = frequency(f);
            double phase = 0.0;
            for (std::size_t d = 0; d < k.size(); ++d) {
                phase += k[d] * x[d];
            }
            acc += coefficients[f] * std::polar(1.0, phase);
        }
        return acc.real();
    }

    /// Largest |c_k| over frequencies with some |k_d| > limit.
    [[nodiscard]] double max_abs_beyond(int limit) const {
        double best = 0.0;
        for (std::size_t f = 0; f < coefficients.size(); ++f) {
            const auto k = frequency(f);
            if (std::any_of(k.begin(), k.end(), [&](int kd) { return std::abs(kd) > limit; })) {
                best = std::max(best, std::abs(coefficients[f]));
            }
        }
        return best;
    }

    /// Largest |c_{-k} - conj(c_k)|.
    [[nodiscard]] double conjugate_symmetry_defect() const {
        double worst = 0.0;
        for (std::size_t f = 0; f < coefficients.size(); ++f) {
            const std::size_t mirror = coefficients.size() - 1 - f;
            worst = std::max(worst, std::abs(coefficients[mirror] - std::conj(coefficients[f])));
        }
        return worst;
    }
};

/// Rectangle-rule Fourier coefficients of f on [0, 2 pi)^M with Q points per
/// axis: c_k = Q^-M sum_x f(x) exp(-i k . x). Exact for trigonometric
/// polynomials of degree < Q - K; Q >= 4K + 4 is required.
inline FourierSpectrum fourier_coefficients(const std::function<double(std::span<const double>)> &f, int dims,
                                            int cutoff, int quadrature) {
    detail::require(dims >= 1, "fourier_coefficients: M must be positive");
    detail::require(cutoff >= 0, "fourier_coefficients: K must be >= 0");
    detail::require(quadrature >= 4 * cutoff + 4, "fourier_coefficients: anti-aliasing requires Q >= 4K + 4");
    const double n_coeff = std::pow(2.0 * cutoff + 1.0, dims);
    const double n_points = std::pow(static_cast<double>(quadrature), dims);
    detail::require(n_coeff <= 1e7 && n_points <= 1e8, "fourier_coefficients: problem too large");

    FourierSpectrum spec;
    spec.dims = dims;
    spec.cutoff = cutoff;
    spec.quadrature = quadrature;
    const std::size_t side = spec.side();
    const auto q = static_cast<std::size_t>(quadrature);
    std::size_t total_coeff = 1, total_points = 1;
    for (int d = 0; d < dims; ++d) {
        total_coeff *= side;
        total_points *= q;
    }
    // phase[k + K][j] = exp(-i k x_j)
    std::vector<std::vector<std::complex<double>>> phase(side, std::vector<std::complex<double>>(q));
    for (std::size_t kk = 0; kk < side; ++kk) {
        const int k = static_cast<int>(kk) - cutoff;
        for (std::size_t j = 0; j < q; ++j) {
            const auto jk = static_cast<long long>(k) * static_cast<long long>(j) % quadrature;
            phase[kk][j] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(jk) / quadrature);
        }
    }
    std::vector<double> values(total_points);
    std::vector<double> x(static_cast<std::size_t>(dims));
    for (std::size_t p = 0; p < total_points; ++p) {
        std::size_t rem = p;
        for (int d = dims - 1; d >= 0; --d) {
            x[static_cast<std::size_t>(d)] = 2.0 * std::numbers::pi * static_cast<double>(rem % q) / quadrature;
            rem /= q;
        }
        values[p] = f(x);
    }
    spec.coefficients.assign(total_coeff, {});
    std::vector<std::size_t> jidx(static_cast<std::size_t>(dims));
    for (std::size_t c = 0; c < total_coeff; ++c) {
        const auto k = spec.frequency(c);
        std::complex<double> acc{};
        for (std::size_t p = 0; p < total_points; ++p) {
            std::size_t rem = p;
            std::complex<double> ph{1.0, 0.0};
            for (int d = dims - 1; d >= 0; --d) {
                ph *= phase[static_cast<std::size_t>(k[static_cast<std::size_t>(d)] + cutoff)][rem % q];
                rem /= q;
            }
            acc += values[p] * ph;
        }
        spec.coefficients[c] = acc / static_cast<double>(total_points);
    }
    return spec;
}

// ---------------------------------------------------------------------------
// Feasibility
// ---------------------------------------------------------------------------

/// Binary entropy in bits.
inline double binary_entropy(double q) {
    if (q <= 0.0 || q >= 1.0) {
        return 0.0;
    }
    return -q * std::log2(q) - (1.0 - q) * std::log2(1.0 - q);
}

/// (1 - H(q)) / ln(1/q) for q in (1/2, 1).
inline double holevo_chernoff_coefficient(double q) {
    detail::require(q > 0.5 && q < 1.0, "holevo_chernoff_coefficient: q must lie in (1/2, 1)");
    return (1.0 - binary_entropy(q)) / std::log(1.0 / q);
}

/// q in {0.51, 0.52, ..., 0.99}.
inline std::vector<double> default_q_grid() {
    std::vector<double> g;
    for (int i = 51; i <= 99; ++i) {
        g.push_back(i / 100.0);
    }
    return g;
}

struct FeasibilityCheck {
    std::string name;
    bool passed = false;
    double bound = 0.0;
    double observed = 0.0;
    std::string detail;
};

struct ObservableRequirement {
    SpectralSummary spectrum;
    bool spectral_range_ok = false;
    double required_n = 0.0;           // Lambda-based, maximized over the q grid
    double required_n_norm_based = 0.0; // same with ||O||^2 in place of Lambda
};

struct FeasibilityReport {
    int n_qubits = 0;
    int output_dim = 0;
    double epsilon = 0.0;
    double gamma = 0.0;
    std::vector<double> q_grid;
    std::vector<double> entropies;    // H(q), bits
    std::vector<double> coefficients; // (1 - H(q)) / ln(1/q)
    double q_star = 0.0;              // grid point with the largest coefficient
    std::vector<ObservableRequirement> observables;
    double n_min = 0.0; // binding Holevo/Chernoff requirement (max over observables)
    std::vector<FeasibilityCheck> checks;

    [[nodiscard]] bool feasible() const {
        return std::all_of(checks.begin(), checks.end(), [](const auto &c) { return c.passed; });
    }
    [[nodiscard]] const FeasibilityCheck &check(const std::string &name) const {
        for (const auto &c : checks) {
            if (c.name == name) {
                return c;
            }
        }
        throw ValidationError("FeasibilityReport: no check named '" + name + "'");
    }
};

/// Necessary conditions for an n-qubit sampler with M observables to be
/// epsilon-universal on [-1, 1]^M:
///  (i)   M <= 4^n - 1;
///  (ii)  lambda_min <= -1 + eps and lambda_max >= 1 - eps per observable;
///  (iii) n >= max_q [(1 - H(q)) / ln(1/q)] (1 - eps)^2 M / Lambda per observable.
/// A single spectrum is applied to all M observables.
inline FeasibilityReport check_feasibility(int n_qubits, int output_dim, double epsilon,
                                           const std::vector<SpectralSummary> &spectra,
                                           std::vector<double> q_grid = default_q_grid()) {
    detail::require(epsilon > 0.0 && epsilon < 1.0, "check_feasibility: epsilon must lie in (0, 1)");
    detail::require(n_qubits >= 1, "check_feasibility: n must be >= 1");
    detail::require(output_dim >= 1, "check_feasibility: M must be >= 1");
    detail::require(!spectra.empty() && (spectra.size() == 1 || spectra.size() == static_cast<std::size_t>(output_dim)),
                    "check_feasibility: give one spectrum or one per observable");
    detail::require(!q_grid.empty(), "check_feasibility: empty q grid");
    for (double q : q_grid) {
        detail::require(q > 0.5 && q < 1.0, "check_feasibility: q grid must lie in (1/2, 1)");
    }

    FeasibilityReport r;
    r.n_qubits = n_qubits;
    r.output_dim = output_dim;
    r.epsilon = epsilon;
    r.gamma = 1.0 - epsilon;
    r.q_grid = std::move(q_grid);
    double best_coeff = -1.0;
    for (double q : r.q_grid) {
        r.entropies.push_back(binary_entropy(q));
        r.coefficients.push_back(holevo_chernoff_coefficient(q));
        if (r.coefficients.back() > best_coeff) {
            best_coeff = r.coefficients.back();
            r.q_star = q;
        }
    }

    const double dim_bound = std::pow(4.0, n_qubits) - 1.0;
    r.checks.push_back({"dimension", output_dim <= dim_bound, dim_bound, static_cast<double>(output_dim),
                        "M <= 4^n - 1"});

    const double inf = std::numeric_limits<double>::infinity();
    const double g2m = r.gamma * r.gamma * output_dim;
    bool range_ok = true;
    double worst_min = -inf, worst_max = inf;
    r.n_min = 0.0;
    for (const auto &s : spectra) {
        ObservableRequirement req;
        req.spectrum = s;
        req.spectral_range_ok = s.lambda_min <= -1.0 + epsilon && s.lambda_max >= 1.0 - epsilon;
        range_ok = range_ok && req.spectral_range_ok;
        worst_min = std::max(worst_min, s.lambda_min);
        worst_max = std::min(worst_max, s.lambda_max);
        req.required_n = s.capital_lambda > 0.0 ? best_coeff * g2m / s.capital_lambda : inf;
        const double norm2 = s.spectral_norm * s.spectral_norm;
        req.required_n_norm_based = norm2 > 0.0 ? best_coeff * g2m / norm2 : inf;
        r.n_min = std::max(r.n_min, req.required_n);
        r.observables.push_back(req);
    }
    r.checks.push_back({"spectral_range", range_ok, -1.0 + epsilon, worst_min,
                        "lambda_min <= -1 + eps and lambda_max >= 1 - eps (observed: largest lambda_min; "
                        "smallest lambda_max = " + std::to_string(worst_max) + ")"});
    r.checks.push_back({"holevo_chernoff", static_cast<double>(n_qubits) >= r.n_min, r.n_min,
                        static_cast<double>(n_qubits), "n >= max_q coeff(q) (1 - eps)^2 M / Lambda"});
    return r;
}

} // namespace evs
