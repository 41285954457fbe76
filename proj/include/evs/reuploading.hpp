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
 * Single-qubit data re-uploading circuits and a least-squares fitter.
 *
 * Each layer l applies, in time order,
 *
 *     RZ(theta[M+1, l]) ; RZ(x_M theta[M, l]) ... RZ(x_1 theta[1, l]) ; RY(theta[0, l])
 *
 * so that U(x) = prod_l RY(theta[0,l]) (prod_m RZ(x_m theta[m,l])) RZ(theta[M+1,l]).
 * Weight (j, l) lives at flat index l * (M + 2) + j.
 *
 * Sign convention: a state with amplitude f on |1> has <Z> = 1 - 2 f^2 under
 * the standard Z = diag(+1, -1). The amplitude-encoding identity
 * <Z'> = 2 f^2 - 1 = g uses Z' = diag(-1, +1), see amplitude_z_observable().
 */

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "evs/error.hpp"
#include "evs/quantum_core.hpp"
#include "evs/rng.hpp"

namespace evs {

/// Appends `layers` re-uploading layers acting on `qubit`. Data gate m reads
/// data index `data_indices[m]`; weights start at `weight_offset`.
inline void append_reuploading_layers(ParameterizedCircuit &circuit, int qubit,
                                      std::span<const int> data_indices, int weight_offset,
                                      int layers) {
    const int m_dim = static_cast<int>(data_indices.size());
    for (int l = 0; l < layers; ++l) {
        const int base = weight_offset + l * (m_dim + 2);
        circuit.rz(qubit, Binding::trainable(base + m_dim + 1));
        for (int m = m_dim - 1; m >= 0; --m) {
            circuit.rz(qubit, Binding::data_product(data_indices[static_cast<std::size_t>(m)], base + 1 + m));
        }
        circuit.ry(qubit, Binding::trainable(base));
    }
}

class ReuploadingCircuit {
  public:
    ReuploadingCircuit(int data_dim, int layers) : data_dim_(data_dim), layers_(layers), circuit_(1) {
        std::vector<int> idx(static_cast<std::size_t>(data_dim));
        for (int m = 0; m < data_dim; ++m) {
            idx[static_cast<std::size_t>(m)] = m;
        }
        append_reuploading_layers(circuit_, 0, idx, 0, layers);
    }

    [[nodiscard]] int data_dim() const { return data_dim_; }
    [[nodiscard]] int layers() const { return layers_; }
    [[nodiscard]] std::size_t num_weights() const {
        return static_cast<std::size_t>((data_dim_ + 2) * layers_);
    }
    [[nodiscard]] const ParameterizedCircuit &circuit() const { return circuit_; }

    /// Flat index of weight (j, l); j = 0 is the RY angle, j = M + 1 the bias.
    [[nodiscard]] std::size_t weight_index(int j, int l) const {
        return static_cast<std::size_t>(l * (data_dim_ + 2) + j);
    }

  private:
    int data_dim_;
    int layers_;
    ParameterizedCircuit circuit_;
};

inline ReuploadingCircuit build_reuploading(int data_dim, int layers) {
    detail::require(data_dim >= 1, "build_reuploading: data dimension M must be positive");
    detail::require(layers >= 1, "build_reuploading: layer count L must be positive");
    return ReuploadingCircuit(data_dim, layers);
}

/// Z' = diag(-1, +1) on one qubit, so that <Z'> = 2 f^2 - 1 for amplitude f on |1>.
inline Observable amplitude_z_observable(int n_qubits = 1, int qubit = 0) {
    return Observable::local(n_qubits, qubit, 'Z', -1.0);
}

/// f = sqrt((g + 1) / 2); the inverse of g = 2 f^2 - 1.
inline double amplitude_target_transform(double g) {
    detail::require(g >= -1.0 && g <= 1.0 && std::isfinite(g),
                    "amplitude_target_transform: g must lie in [-1, 1]");
    return std::sqrt((g + 1.0) / 2.0);
}

inline double evaluate_model(const ReuploadingCircuit &rc, std::span<const double> weights,
                             std::span<const double> x, const Observable &obs) {
    detail::require(weights.size() == rc.num_weights(),
                    "evaluate_model: expected " + std::to_string(rc.num_weights()) + " weights");
    detail::require(x.size() == static_cast<std::size_t>(rc.data_dim()),
                    "evaluate_model: expected " + std::to_string(rc.data_dim()) + " inputs");
    for (double v : x) {
        detail::require(v >= 0.0 && v <= 1.0, "evaluate_model: inputs must lie in [0, 1]");
    }
    detail::require(obs.n_qubits() == 1, "evaluate_model: observable must act on one qubit");
    return expectation(run_circuit(rc.circuit(), weights, x), obs);
}

// ---------------------------------------------------------------------------
// Tabulated targets
// ---------------------------------------------------------------------------

/// Function values on the uniform grid {0, 1/(G-1), ..., 1}^M, first axis
/// most significant.
struct GridFunction {
    int dims = 1;
    int points_per_dim = 2;
    std::vector<double> values;

    [[nodiscard]] std::size_t size() const { return values.size(); }

    [[nodiscard]] std::vector<double> node(std::size_t flat) const {
        std::vector<double> x(static_cast<std::size_t>(dims));
        for (int d = dims - 1; d >= 0; --d) {
            const auto i = flat % static_cast<std::size_t>(points_per_dim);
            flat /= static_cast<std::size_t>(points_per_dim);
            x[static_cast<std::size_t>(d)] = static_cast<double>(i) / (points_per_dim - 1);
        }
        return x;
    }
};

inline GridFunction tabulate(const std::function<double(std::span<const double>)> &f, int dims,
                             int points_per_dim) {
    detail::require(dims >= 1, "tabulate: dims must be positive");
    detail::require(points_per_dim >= 2, "tabulate: need at least 2 points per dimension");
    GridFunction g{dims, points_per_dim, {}};
    std::size_t total = 1;
    for (int d = 0; d < dims; ++d) {
        total *= static_cast<std::size_t>(points_per_dim);
    }
    g.values.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
        const auto x = g.node(i);
        g.values[i] = f(x);
    }
    return g;
}

// ---------------------------------------------------------------------------
// Fitting
// ---------------------------------------------------------------------------

enum class GradientMode { finite_difference, parameter_shift };

struct FitConfig {
    int grid_points_per_dim = 64;
    int max_iters = 2000;
    double step_size = 0.05; // Adam learning rate
    GradientMode gradient_mode = GradientMode::finite_difference;
    double tolerance = 1e-12;
    std::uint64_t seed = 0;
    int restarts = 4;
    double fd_step = 1e-5;

    void validate() const {
        detail::require(grid_points_per_dim >= 2, "FitConfig: grid_points_per_dim must be >= 2");
        detail::require(step_size > 0.0, "FitConfig: step_size must be positive");
        detail::require(max_iters >= 1, "FitConfig: max_iters must be >= 1");
        detail::require(restarts >= 1, "FitConfig: restarts must be >= 1");
        detail::require(tolerance >= 0.0, "FitConfig: tolerance must be nonnegative");
        detail::require(fd_step > 0.0, "FitConfig: fd_step must be positive");
    }
};

struct FitResult {
    std::vector<double> weights;
    double final_loss = 0.0;
    /// Entry i is the lowest loss reached by iteration i of the selected restart.
    std::vector<double> loss_history;
    int restart = 0;
    /// Best loss of each restart, in restart order.
    std::vector<double> restart_losses;
};

namespace detail {

inline double expect_2x2(const Mat2 &h, cplx a0, cplx a1) {
    const cplx r0 = h[0] * a0 + h[1] * a1;
    const cplx r1 = h[2] * a0 + h[3] * a1;
    return (std::conj(a0) * r0 + std::conj(a1) * r1).real();
}

/// Mean squared error and its gradient for a single-qubit circuit whose
/// trainable weights are each used by exactly one gate. Perturbations are
/// applied gate by gate using cached forward states and Heisenberg-evolved
/// observables, so each gradient costs O(gates) per grid point.
class SingleQubitLoss {
  public:
    SingleQubitLoss(const ParameterizedCircuit &circuit, const Observable &obs,
                    const GridFunction &target, GradientMode mode, double fd_step)
        : circuit_(circuit), target_(target), mode_(mode), fd_step_(fd_step) {
        require(circuit.n_qubits() == 1, "fit: circuit must act on a single qubit");
        require(obs.n_qubits() == 1, "fit: observable must act on a single qubit");
        require(static_cast<std::size_t>(target.dims) >= circuit.data_dim(),
                "fit: target grid dimension smaller than circuit data dimension");
        const DenseMatrix m = obs.to_dense();
        obs_ = {m(0, 0), m(0, 1), m(1, 0), m(1, 1)};
        std::vector<int> uses(circuit.num_weights(), 0);
        for (const auto &g : circuit.gates()) {
            require(g.kind != GateKind::CNOT, "fit: CNOT in single-qubit circuit");
            if (g.is_rotation() && g.binding.kind != BindingKind::constant) {
                ++uses[static_cast<std::size_t>(g.binding.weight)];
            }
        }
        for (int u : uses) {
            require(u <= 1, "fit: each trainable weight must be used by at most one gate");
        }
        nodes_.reserve(target.size());
        for (std::size_t i = 0; i < target.size(); ++i) {
            nodes_.push_back(target.node(i));
        }
    }

    [[nodiscard]] std::size_t num_weights() const { return circuit_.num_weights(); }

    double operator()(std::span<const double> w, std::vector<double> *grad) const {
        const auto &gates = circuit_.gates();
        const std::size_t ng = gates.size();
        std::vector<Mat2> mats(ng);
        std::vector<double> angles(ng);
        std::vector<std::array<cplx, 2>> fwd(ng + 1);
        if (grad != nullptr) {
            grad->assign(num_weights(), 0.0);
        }
        double loss = 0.0;
        for (std::size_t p = 0; p < nodes_.size(); ++p) {
            const auto &x = nodes_[p];
            fwd[0] = {cplx{1, 0}, cplx{0, 0}};
            for (std::size_t g = 0; g < ng; ++g) {
                angles[g] = gates[g].is_rotation() ? gates[g].binding.resolve(w, x) : 0.0;
                mats[g] = gates[g].single_qubit_matrix(angles[g]);
                const auto &s = fwd[g];
                fwd[g + 1] = {mats[g][0] * s[0] + mats[g][1] * s[1], mats[g][2] * s[0] + mats[g][3] * s[1]};
            }
            const double f = expect_2x2(obs_, fwd[ng][0], fwd[ng][1]);
            const double r = f - target_.values[p];
            loss += r * r;
            if (grad == nullptr) {
                continue;
            }
            Mat2 h = obs_;
            for (std::size_t gi = ng; gi-- > 0;) {
                const auto &g = gates[gi];
                if (g.is_rotation() && g.binding.kind != BindingKind::constant) {
                    const double factor = g.binding.weight_factor(x);
                    double dfdw = 0.0;
                    if (mode_ == GradientMode::finite_difference) {
                        const double dp = eval_perturbed(g, angles[gi] + factor * fd_step_, fwd[gi], h);
                        const double dm = eval_perturbed(g, angles[gi] - factor * fd_step_, fwd[gi], h);
                        dfdw = (dp - dm) / (2.0 * fd_step_);
                    } else {
                        const double shift = std::numbers::pi / 2;
                        const double dp = eval_perturbed(g, angles[gi] + shift, fwd[gi], h);
                        const double dm = eval_perturbed(g, angles[gi] - shift, fwd[gi], h);
                        dfdw = factor * (dp - dm) / 2.0;
                    }
                    (*grad)[static_cast<std::size_t>(g.binding.weight)] += 2.0 * r * dfdw;
                }
                h = gates::matmul(gates::adjoint(mats[gi]), gates::matmul(h, mats[gi]));
            }
        }
        const auto npts = static_cast<double>(nodes_.size());
        if (grad != nullptr) {
            for (auto &gv : *grad) {
                gv /= npts;
            }
        }
        return loss / npts;
    }

  private:
    static double eval_perturbed(const GateOp &g, double angle, const std::array<cplx, 2> &s,
                                 const Mat2 &h) {
        const Mat2 u = g.single_qubit_matrix(angle);
        return expect_2x2(h, u[0] * s[0] + u[1] * s[1], u[2] * s[0] + u[3] * s[1]);
    }

    const ParameterizedCircuit &circuit_;
    Mat2 obs_{};
    const GridFunction &target_;
    GradientMode mode_;
    double fd_step_;
    std::vector<std::vector<double>> nodes_;
};

} // namespace detail

/// Gradient of <O>(x) with respect to the circuit weights, one full simulation
/// per perturbed gate. Used as a reference for the fitter's cached path.
inline std::vector<double> model_gradient(const ParameterizedCircuit &circuit,
                                          std::span<const double> weights,
                                          std::span<const double> x, const Observable &obs,
                                          GradientMode mode, double fd_step = 1e-5) {
    circuit.validate(weights, x);
    const auto &gates = circuit.gates();
    std::vector<double> grad(circuit.num_weights(), 0.0);
    for (std::size_t gi = 0; gi < gates.size(); ++gi) {
        const auto &g = gates[gi];
        if (!g.is_rotation() || g.binding.kind == BindingKind::constant) {
            continue;
        }
        const auto eval_with = [&](double angle) {
            ParameterizedCircuit c(circuit.n_qubits());
            for (std::size_t k = 0; k < gates.size(); ++k) {
                GateOp op = gates[k];
                if (k == gi) {
                    op.binding = Binding::constant(angle);
                }
                c.push(op);
            }
            return expectation(run_circuit(c, weights, x), obs);
        };
        const double a = g.binding.resolve(weights, x);
        const double factor = g.binding.weight_factor(x);
        double d = 0.0;
        if (mode == GradientMode::finite_difference) {
            d = (eval_with(a + factor * fd_step) - eval_with(a - factor * fd_step)) / (2.0 * fd_step);
        } else {
            d = factor * (eval_with(a + std::numbers::pi / 2) - eval_with(a - std::numbers::pi / 2)) / 2.0;
        }
        grad[static_cast<std::size_t>(g.binding.weight)] += d;
    }
    return grad;
}

/// Least-squares fit of <obs>(x) to a tabulated target with Adam updates, a
/// cosine learning-rate decay, and seeded restarts. Returns the best weights over all restarts.
inline FitResult fit_to_function(const ReuploadingCircuit &rc, const GridFunction &target,
                                 const Observable &obs, const FitConfig &cfg) {
    cfg.validate();
    detail::require(!target.values.empty(), "fit_to_function: empty target grid");
    detail::require(target.dims == rc.data_dim(),
                    "fit_to_function: target dimension must equal circuit data dimension");
    for (double v : target.values) {
        detail::require(std::isfinite(v) && v >= -1.0 && v <= 1.0,
                        "fit_to_function: target values must lie in [-1, 1]");
    }
    const detail::SingleQubitLoss loss_fn(rc.circuit(), obs, target, cfg.gradient_mode, cfg.fd_step);
    const std::size_t nw = rc.num_weights();
    constexpr double kBeta1 = 0.9, kBeta2 = 0.99, kEps = 1e-12;
    constexpr int kWindow = 50;

    FitResult best;
    best.final_loss = std::numeric_limits<double>::infinity();
    for (int r = 0; r < cfg.restarts; ++r) {
        std::vector<double> w(nw);
        for (std::size_t j = 0; j < nw; ++j) {
            w[j] = (2.0 * rng::uniform(cfg.seed, rng::Stream::init, static_cast<std::uint64_t>(r), j) - 1.0) *
                   std::numbers::pi;
        }
        std::vector<double> m(nw, 0.0), v(nw, 0.0), grad;
        std::vector<double> best_w = w;
        double best_loss = std::numeric_limits<double>::infinity();
        std::vector<double> history;
        history.reserve(static_cast<std::size_t>(cfg.max_iters));
        for (int it = 0; it < cfg.max_iters; ++it) {
            const double loss = loss_fn(w, &grad);
            if (!std::isfinite(loss)) {
                throw RuntimeError("fit_to_function: non-finite loss at iteration " + std::to_string(it));
            }
            if (loss < best_loss) {
                best_loss = loss;
                best_w = w;
            }
            history.push_back(best_loss);
            if (it >= kWindow && history[static_cast<std::size_t>(it - kWindow)] - best_loss < cfg.tolerance) {
                break;
            }
            // cosine decay of the learning rate down to 1e-3 of its initial value
            const double progress = static_cast<double>(it) / cfg.max_iters;
            const double lr = cfg.step_size * (1e-3 + (1.0 - 1e-3) * 0.5 * (1.0 + std::cos(std::numbers::pi * progress)));
            const double b1t = 1.0 - std::pow(kBeta1, it + 1);
            const double b2t = 1.0 - std::pow(kBeta2, it + 1);
            for (std::size_t j = 0; j < nw; ++j) {
                m[j] = kBeta1 * m[j] + (1 - kBeta1) * grad[j];
                v[j] = kBeta2 * v[j] + (1 - kBeta2) * grad[j] * grad[j];
                w[j] -= lr * (m[j] / b1t) / (std::sqrt(v[j] / b2t) + kEps);
            }
        }
        best.restart_losses.push_back(best_loss);
        if (best_loss < best.final_loss) {
            best.final_loss = best_loss;
            best.weights = std::move(best_w);
            best.loss_history = std::move(history);
            best.restart = r;
        }
    }
    return best;
}

/// Loss of given weights on a tabulated target (same objective as the fitter).
inline double fit_loss(const ReuploadingCircuit &rc, std::span<const double> weights,
                       const GridFunction &target, const Observable &obs) {
    const detail::SingleQubitLoss loss_fn(rc.circuit(), obs, target, GradientMode::finite_difference, 1e-5);
    return loss_fn(weights, nullptr);
}

} // namespace evs
