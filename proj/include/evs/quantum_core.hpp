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
 * Dense statevector simulation, observables and spectral bookkeeping.
 *
 * Qubit 0 is the most significant bit of the basis index: on n qubits the
 * basis state |b_0 b_1 ... b_{n-1}> has index sum_q b_q 2^(n-1-q).
 */

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "evs/error.hpp"

namespace evs {

using cplx = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;

inline constexpr int kMaxStateQubits = 12;
inline constexpr int kMaxDenseQubits = 7;

/// Row-major 2x2 complex matrix.
using Mat2 = std::array<cplx, 4>;

namespace gates {

inline Mat2 rx(double a) {
    const double c = std::cos(a / 2), s = std::sin(a / 2);
    return {cplx{c, 0}, cplx{0, -s}, cplx{0, -s}, cplx{c, 0}};
}
inline Mat2 ry(double a) {
    const double c = std::cos(a / 2), s = std::sin(a / 2);
    return {cplx{c, 0}, cplx{-s, 0}, cplx{s, 0}, cplx{c, 0}};
}
inline Mat2 rz(double a) {
    return {std::polar(1.0, -a / 2), cplx{}, cplx{}, std::polar(1.0, a / 2)};
}
inline Mat2 phase(double a) { return {cplx{1, 0}, cplx{}, cplx{}, std::polar(1.0, a)}; }

inline Mat2 matmul(const Mat2 &a, const Mat2 &b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3]};
}
inline Mat2 adjoint(const Mat2 &a) {
    return {std::conj(a[0]), std::conj(a[2]), std::conj(a[1]), std::conj(a[3])};
}

/// Max-entry deviation of U^dagger U from the identity.
inline double unitarity_defect(const Mat2 &u) {
    const Mat2 p = matmul(adjoint(u), u);
    return std::max({std::abs(p[0] - 1.0), std::abs(p[1]), std::abs(p[2]), std::abs(p[3] - 1.0)});
}

} // namespace gates

// ---------------------------------------------------------------------------
// StateVector
// ---------------------------------------------------------------------------

class StateVector {
  public:
    /// |0...0> on `n_qubits` qubits.
    explicit StateVector(int n_qubits) : n_(n_qubits) {
        detail::require(n_qubits >= 1 && n_qubits <= kMaxStateQubits,
                        "StateVector: qubit count must be in [1, " +
                            std::to_string(kMaxStateQubits) + "]");
        amps_.assign(std::size_t{1} << n_qubits, cplx{});
        amps_[0] = 1.0;
    }

    /// Wraps explicit amplitudes; the vector must have unit norm within `tol`.
    static StateVector from_amplitudes(int n_qubits, std::vector<cplx> amps, double tol = 1e-12) {
        StateVector s(n_qubits);
        detail::require(amps.size() == s.amps_.size(),
                        "StateVector: amplitude count must be 2^n_qubits");
        s.amps_ = std::move(amps);
        detail::require(std::abs(s.norm() - 1.0) <= tol, "StateVector: amplitudes are not normalized");
        return s;
    }

    static StateVector basis(int n_qubits, std::size_t index) {
        StateVector s(n_qubits);
        detail::require(index < s.dim(), "StateVector: basis index out of range");
        s.amps_[0] = 0.0;
        s.amps_[index] = 1.0;
        return s;
    }

    [[nodiscard]] int n_qubits() const { return n_; }
    [[nodiscard]] std::size_t dim() const { return amps_.size(); }
    [[nodiscard]] std::span<const cplx> amplitudes() const { return amps_; }
    [[nodiscard]] cplx amplitude(std::size_t i) const { return amps_[i]; }
    [[nodiscard]] double probability(std::size_t i) const { return std::norm(amps_[i]); }

    [[nodiscard]] double norm() const {
        double acc = 0.0;
        for (const auto &a : amps_) {
            acc += std::norm(a);
        }
        return std::sqrt(acc);
    }

    void apply_1q(int qubit, const Mat2 &u) {
        const std::size_t stride = std::size_t{1} << (n_ - 1 - qubit);
        const std::size_t d = dim();
        for (std::size_t base = 0; base < d; base += 2 * stride) {
            for (std::size_t off = 0; off < stride; ++off) {
                const std::size_t i0 = base + off, i1 = i0 + stride;
                const cplx a0 = amps_[i0], a1 = amps_[i1];
                amps_[i0] = u[0] * a0 + u[1] * a1;
                amps_[i1] = u[2] * a0 + u[3] * a1;
            }
        }
    }

    void apply_cnot(int control, int target) {
        const std::size_t cmask = std::size_t{1} << (n_ - 1 - control);
        const std::size_t tmask = std::size_t{1} << (n_ - 1 - target);
        for (std::size_t i = 0; i < dim(); ++i) {
            if ((i & cmask) != 0 && (i & tmask) == 0) {
                std::swap(amps_[i], amps_[i | tmask]);
            }
        }
    }

  private:
    int n_;
    std::vector<cplx> amps_;
};

// ---------------------------------------------------------------------------
// Gates and circuits
// ---------------------------------------------------------------------------

enum class GateKind { RX, RY, RZ, PHASE, CNOT, FIXED_1Q };

enum class BindingKind { constant, trainable, data_product };

/// How a rotation angle is obtained at run time.
struct Binding {
    BindingKind kind = BindingKind::constant;
    double angle = 0.0; // constant
    int weight = -1;    // trainable, data_product
    int data = -1;      // data_product

    static Binding constant(double a) { return {BindingKind::constant, a, -1, -1}; }
    static Binding trainable(int w) { return {BindingKind::trainable, 0.0, w, -1}; }
    /// angle = data[m] * weights[w]
    static Binding data_product(int m, int w) { return {BindingKind::data_product, 0.0, w, m}; }

    [[nodiscard]] double resolve(std::span<const double> weights, std::span<const double> data) const {
        switch (kind) {
        case BindingKind::constant:
            return angle;
        case BindingKind::trainable:
            return weights[static_cast<std::size_t>(weight)];
        case BindingKind::data_product:
            return data[static_cast<std::size_t>(this->data)] *
                   weights[static_cast<std::size_t>(weight)];
        }
        return 0.0;
    }

    /// d(angle)/d(weight) for the bound weight.
    [[nodiscard]] double weight_factor(std::span<const double> data) const {
        switch (kind) {
        case BindingKind::trainable:
            return 1.0;
        case BindingKind::data_product:
            return data[static_cast<std::size_t>(this->data)];
        default:
            return 0.0;
        }
    }
};

struct GateOp {
    GateKind kind = GateKind::RX;
    std::vector<int> targets; // CNOT: {control, target}
    Binding binding;
    Mat2 matrix{}; // FIXED_1Q payload

    [[nodiscard]] bool is_rotation() const {
        return kind == GateKind::RX || kind == GateKind::RY || kind == GateKind::RZ ||
               kind == GateKind::PHASE;
    }

    [[nodiscard]] Mat2 single_qubit_matrix(double angle) const {
        switch (kind) {
        case GateKind::RX:
            return gates::rx(angle);
        case GateKind::RY:
            return gates::ry(angle);
        case GateKind::RZ:
            return gates::rz(angle);
        case GateKind::PHASE:
            return gates::phase(angle);
        case GateKind::FIXED_1Q:
            return matrix;
        case GateKind::CNOT:
            break;
        }
        throw ValidationError("GateOp: CNOT has no single-qubit matrix");
    }
};

inline const char *to_string(GateKind k) {
    switch (k) {
    case GateKind::RX:
        return "RX";
    case GateKind::RY:
        return "RY";
    case GateKind::RZ:
        return "RZ";
    case GateKind::PHASE:
        return "PHASE";
    case GateKind::CNOT:
        return "CNOT";
    case GateKind::FIXED_1Q:
        return "FIXED_1Q";
    }
    return "?";
}

inline GateKind gate_kind_from_string(const std::string &s) {
    for (GateKind k : {GateKind::RX, GateKind::RY, GateKind::RZ, GateKind::PHASE, GateKind::CNOT,
                       GateKind::FIXED_1Q}) {
        if (s == to_string(k)) {
            return k;
        }
    }
    throw ValidationError("unknown gate kind '" + s + "'");
}

/// Gate sequence in application order; U(x) = G_last ... G_first.
class ParameterizedCircuit {
  public:
    ParameterizedCircuit() = default;
    explicit ParameterizedCircuit(int n_qubits) : n_(n_qubits) {
        detail::require(n_qubits >= 1 && n_qubits <= kMaxStateQubits,
                        "ParameterizedCircuit: qubit count out of range");
    }

    [[nodiscard]] int n_qubits() const { return n_; }
    [[nodiscard]] const std::vector<GateOp> &gates() const { return gates_; }
    [[nodiscard]] std::size_t size() const { return gates_.size(); }

    ParameterizedCircuit &rotation(GateKind kind, int qubit, Binding b) {
        detail::require(kind == GateKind::RX || kind == GateKind::RY || kind == GateKind::RZ ||
                            kind == GateKind::PHASE,
                        "rotation: kind must be RX, RY, RZ or PHASE");
        gates_.push_back(GateOp{kind, {qubit}, b, {}});
        return *this;
    }
    ParameterizedCircuit &rx(int q, Binding b) { return rotation(GateKind::RX, q, b); }
    ParameterizedCircuit &ry(int q, Binding b) { return rotation(GateKind::RY, q, b); }
    ParameterizedCircuit &rz(int q, Binding b) { return rotation(GateKind::RZ, q, b); }
    ParameterizedCircuit &phase(int q, Binding b) { return rotation(GateKind::PHASE, q, b); }
    ParameterizedCircuit &cnot(int control, int target) {
        gates_.push_back(GateOp{GateKind::CNOT, {control, target}, Binding{}, {}});
        return *this;
    }
    ParameterizedCircuit &fixed(int q, const Mat2 &u) {
        gates_.push_back(GateOp{GateKind::FIXED_1Q, {q}, Binding{}, u});
        return *this;
    }
    ParameterizedCircuit &push(GateOp op) {
        gates_.push_back(std::move(op));
        return *this;
    }

    /// One past the largest weight index referenced.
    [[nodiscard]] std::size_t num_weights() const {
        int m = -1;
        for (const auto &g : gates_) {
            if (g.binding.kind != BindingKind::constant) {
                m = std::max(m, g.binding.weight);
            }
        }
        return static_cast<std::size_t>(m + 1);
    }

    /// One past the largest data index referenced.
    [[nodiscard]] std::size_t data_dim() const {
        int m = -1;
        for (const auto &g : gates_) {
            if (g.binding.kind == BindingKind::data_product) {
                m = std::max(m, g.binding.data);
            }
        }
        return static_cast<std::size_t>(m + 1);
    }

    [[nodiscard]] bool has_data_bindings() const { return data_dim() > 0; }

    /// Structural checks plus binding bounds against the given inputs.
    void validate(std::span<const double> weights, std::span<const double> data) const {
        for (std::size_t gi = 0; gi < gates_.size(); ++gi) {
            const auto &g = gates_[gi];
            const std::string where = "gate " + std::to_string(gi) + " (" + to_string(g.kind) + "): ";
            if (g.kind == GateKind::CNOT) {
                detail::require(g.targets.size() == 2, where + "CNOT needs control and target");
                detail::require(g.targets[0] != g.targets[1], where + "control equals target");
            } else {
                detail::require(g.targets.size() == 1, where + "expected one target");
            }
            for (int t : g.targets) {
                detail::require(t >= 0 && t < n_, where + "qubit index out of range");
            }
            if (g.kind == GateKind::FIXED_1Q) {
                detail::require(gates::unitarity_defect(g.matrix) <= 1e-12,
                                where + "payload is not unitary");
            }
            if (!g.is_rotation()) {
                continue;
            }
            const auto &b = g.binding;
            if (b.kind != BindingKind::constant) {
                detail::require(b.weight >= 0 && static_cast<std::size_t>(b.weight) < weights.size(),
                                where + "weight index out of range");
            }
            if (b.kind == BindingKind::data_product) {
                detail::require(b.data >= 0 && static_cast<std::size_t>(b.data) < data.size(),
                                where + "data index out of range");
            }
        }
    }

  private:
    int n_ = 1;
    std::vector<GateOp> gates_;
};

/// Applies the circuit to `state` in place. Inputs must already be validated.
inline void apply_circuit(const ParameterizedCircuit &circuit, std::span<const double> weights,
                          std::span<const double> data, StateVector &state) {
    for (const auto &g : circuit.gates()) {
        if (g.kind == GateKind::CNOT) {
            state.apply_cnot(g.targets[0], g.targets[1]);
        } else {
            const double angle = g.is_rotation() ? g.binding.resolve(weights, data) : 0.0;
            state.apply_1q(g.targets[0], g.single_qubit_matrix(angle));
        }
    }
}

/// U_theta(x)|0...0>.
inline StateVector run_circuit(const ParameterizedCircuit &circuit, std::span<const double> weights,
                               std::span<const double> data) {
    circuit.validate(weights, data);
    StateVector state(circuit.n_qubits());
    apply_circuit(circuit, weights, data, state);
    return state;
}

/// Dense unitary of the bound circuit (column j = U|j>).
inline DenseMatrix circuit_unitary(const ParameterizedCircuit &circuit,
                                   std::span<const double> weights, std::span<const double> data) {
    circuit.validate(weights, data);
    const int n = circuit.n_qubits();
    const auto d = static_cast<Eigen::Index>(std::size_t{1} << n);
    DenseMatrix u(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        StateVector s = StateVector::basis(n, static_cast<std::size_t>(j));
        apply_circuit(circuit, weights, data, s);
        for (Eigen::Index i = 0; i < d; ++i) {
            u(i, j) = s.amplitude(static_cast<std::size_t>(i));
        }
    }
    return u;
}

// ---------------------------------------------------------------------------
// Pauli strings
// ---------------------------------------------------------------------------

/// Pauli string with character i acting on qubit i.
struct PauliTerm {
    double coeff = 1.0;
    std::string paulis;
};

namespace detail {

struct PauliMasks {
    std::size_t x = 0;
    std::size_t z = 0;
    int n_y = 0;
};

inline PauliMasks pauli_masks(const std::string &p) {
    PauliMasks m;
    const std::size_t n = p.size();
    for (std::size_t q = 0; q < n; ++q) {
        const std::size_t bit = std::size_t{1} << (n - 1 - q);
        switch (p[q]) {
        case 'I':
            break;
        case 'X':
            m.x |= bit;
            break;
        case 'Y':
            m.x |= bit;
            m.z |= bit;
            ++m.n_y;
            break;
        case 'Z':
            m.z |= bit;
            break;
        default:
            throw ValidationError(std::string("invalid Pauli character '") + p[q] + "'");
        }
    }
    return m;
}

/// i^k for integer k.
inline cplx i_pow(int k) {
    switch (((k % 4) + 4) % 4) {
    case 0:
        return {1, 0};
    case 1:
        return {0, 1};
    case 2:
        return {-1, 0};
    default:
        return {0, -1};
    }
}

inline double parity_sign(std::size_t v) { return (std::popcount(v) & 1) != 0 ? -1.0 : 1.0; }

/// <psi| P |psi> for a Pauli string; P|b> = i^{nY} (-1)^{|b & z|} |b ^ x>.
inline double pauli_expectation(const PauliMasks &m, std::span<const cplx> psi) {
    cplx acc{};
    for (std::size_t b = 0; b < psi.size(); ++b) {
        acc += std::conj(psi[b ^ m.x]) * psi[b] * parity_sign(b & m.z);
    }
    return (i_pow(m.n_y) * acc).real();
}

} // namespace detail

/// Pauli string for index k of the lexicographic {I,X,Y,Z}^n order.
inline std::string pauli_string(int n, std::size_t k) {
    static constexpr char kLetters[] = {'I', 'X', 'Y', 'Z'};
    std::string s(static_cast<std::size_t>(n), 'I');
    for (int q = n - 1; q >= 0; --q) {
        s[static_cast<std::size_t>(q)] = kLetters[k & 3U];
        k >>= 2U;
    }
    return s;
}

inline DenseMatrix pauli_matrix(const std::string &p) {
    const auto m = detail::pauli_masks(p);
    const std::size_t d = std::size_t{1} << p.size();
    const cplx ph = detail::i_pow(m.n_y);
    DenseMatrix out = DenseMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t b = 0; b < d; ++b) {
        out(static_cast<Eigen::Index>(b ^ m.x), static_cast<Eigen::Index>(b)) =
            ph * detail::parity_sign(b & m.z);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Observables
// ---------------------------------------------------------------------------

struct SpectralSummary {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double spectral_norm = 0.0;
    double capital_lambda = 0.0; // -lambda_min * lambda_max
};

/// Hermitian operator stored either densely or as a real-weighted Pauli sum.
class Observable {
  public:
    using PauliSum = std::vector<PauliTerm>;

    static Observable dense(DenseMatrix m) {
        detail::require(m.rows() == m.cols() && m.rows() >= 2, "Observable: matrix must be square");
        const auto d = static_cast<std::size_t>(m.rows());
        detail::require(std::has_single_bit(d), "Observable: dimension must be a power of two");
        const int n = std::countr_zero(d);
        detail::require(n <= kMaxDenseQubits, "Observable: dense observables limited to " +
                                                  std::to_string(kMaxDenseQubits) + " qubits");
        detail::require(hermiticity_defect(m) <= 1e-12, "Observable: matrix is not Hermitian");
        Observable o;
        o.n_ = n;
        o.rep_ = std::move(m);
        return o;
    }

    static Observable pauli(int n_qubits, PauliSum terms) {
        detail::require(n_qubits >= 1 && n_qubits <= kMaxStateQubits,
                        "Observable: qubit count out of range");
        detail::require(!terms.empty(), "Observable: empty Pauli sum");
        for (const auto &t : terms) {
            detail::require(t.paulis.size() == static_cast<std::size_t>(n_qubits),
                            "Observable: Pauli string length must equal qubit count");
            detail::require(std::isfinite(t.coeff), "Observable: non-finite coefficient");
            (void)detail::pauli_masks(t.paulis);
        }
        Observable o;
        o.n_ = n_qubits;
        o.rep_ = std::move(terms);
        return o;
    }

    /// Single Pauli `letter` on `qubit`, identity elsewhere, scaled by coeff.
    static Observable local(int n_qubits, int qubit, char letter, double coeff = 1.0) {
        detail::require(qubit >= 0 && qubit < n_qubits, "Observable: qubit out of range");
        std::string s(static_cast<std::size_t>(n_qubits), 'I');
        s[static_cast<std::size_t>(qubit)] = letter;
        return pauli(n_qubits, {PauliTerm{coeff, s}});
    }

    static Observable identity(int n_qubits) {
        return pauli(n_qubits, {PauliTerm{1.0, std::string(static_cast<std::size_t>(n_qubits), 'I')}});
    }

    /// scale * |m><m| + shift * I
    static Observable basis_projector(int n_qubits, std::size_t m, double scale = 1.0,
                                      double shift = 0.0) {
        const std::size_t d = std::size_t{1} << n_qubits;
        detail::require(m < d, "Observable: basis index out of range");
        DenseMatrix mat = DenseMatrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)) * shift;
        mat(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m)) += scale;
        return dense(std::move(mat));
    }

    [[nodiscard]] int n_qubits() const { return n_; }
    [[nodiscard]] bool is_pauli() const { return std::holds_alternative<PauliSum>(rep_); }
    [[nodiscard]] const PauliSum &pauli_terms() const { return std::get<PauliSum>(rep_); }
    [[nodiscard]] const DenseMatrix &dense_matrix() const { return std::get<DenseMatrix>(rep_); }

    [[nodiscard]] DenseMatrix to_dense() const {
        if (const auto *m = std::get_if<DenseMatrix>(&rep_)) {
            return *m;
        }
        detail::require(n_ <= kMaxDenseQubits, "Observable: too many qubits for dense expansion");
        const auto d = static_cast<Eigen::Index>(std::size_t{1} << n_);
        DenseMatrix out = DenseMatrix::Zero(d, d);
        for (const auto &t : pauli_terms()) {
            out += t.coeff * pauli_matrix(t.paulis);
        }
        return out;
    }

    static double hermiticity_defect(const DenseMatrix &m) {
        return (m - m.adjoint()).cwiseAbs().maxCoeff();
    }

  private:
    int n_ = 1;
    std::variant<DenseMatrix, PauliSum> rep_;
};

/// <psi|O|psi>.
inline double expectation(const StateVector &state, const Observable &obs) {
    detail::require(state.n_qubits() == obs.n_qubits(),
                    "expectation: state has " + std::to_string(state.n_qubits()) +
                        " qubits, observable has " + std::to_string(obs.n_qubits()));
    const auto psi = state.amplitudes();
    if (obs.is_pauli()) {
        double acc = 0.0;
        for (const auto &t : obs.pauli_terms()) {
            acc += t.coeff * detail::pauli_expectation(detail::pauli_masks(t.paulis), psi);
        }
        return acc;
    }
    const auto &m = obs.dense_matrix();
    const auto d = static_cast<Eigen::Index>(psi.size());
    cplx acc{};
    for (Eigen::Index i = 0; i < d; ++i) {
        cplx row{};
        for (Eigen::Index j = 0; j < d; ++j) {
            row += m(i, j) * psi[static_cast<std::size_t>(j)];
        }
        acc += std::conj(psi[static_cast<std::size_t>(i)]) * row;
    }
    return acc.real();
}

/// The 4^n Pauli strings in lexicographic order, identity first.
inline std::vector<Observable> pauli_basis(int n) {
    detail::require(n >= 1 && n <= kMaxDenseQubits,
                    "pauli_basis: n must be in [1, " + std::to_string(kMaxDenseQubits) + "]");
    const std::size_t count = std::size_t{1} << (2 * n);
    std::vector<Observable> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        out.push_back(Observable::pauli(n, {PauliTerm{1.0, pauli_string(n, k)}}));
    }
    return out;
}

/// Coefficients c_k = Re Tr(O P_k) / 2^n in the lexicographic Pauli basis.
inline std::vector<double> pauli_decompose(const Observable &obs) {
    const int n = obs.n_qubits();
    detail::require(n <= kMaxDenseQubits, "pauli_decompose: too many qubits");
    const DenseMatrix m = obs.to_dense();
    const std::size_t d = std::size_t{1} << n;
    const std::size_t count = d * d;
    std::vector<double> c(count);
    for (std::size_t k = 0; k < count; ++k) {
        const auto masks = detail::pauli_masks(pauli_string(n, k));
        const cplx ph = detail::i_pow(masks.n_y);
        cplx tr{};
        // Tr(O P) = sum_b O(b, b^x) P(b^x, b)
        for (std::size_t b = 0; b < d; ++b) {
            tr += m(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b ^ masks.x)) * ph *
                  detail::parity_sign(b & masks.z);
        }
        c[k] = tr.real() / static_cast<double>(d);
    }
    return c;
}

/// Eigen-decomposition of the dense form (eigenvalues ascending).
struct Eigensystem {
    Eigen::VectorXd values;
    DenseMatrix vectors;
};

inline Eigensystem eigensystem(const Observable &obs) {
    const DenseMatrix m = obs.to_dense();
    detail::require(Observable::hermiticity_defect(m) <= 1e-12, "eigensystem: non-Hermitian input");
    Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(m, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw RuntimeError("eigensystem: eigen solver did not converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

inline SpectralSummary spectral_summary(const Observable &obs) {
    const DenseMatrix m = obs.to_dense();
    detail::require(Observable::hermiticity_defect(m) <= 1e-12,
                    "spectral_summary: non-Hermitian input");
    Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw RuntimeError("spectral_summary: eigen solver did not converge");
    }
    const auto &ev = solver.eigenvalues();
    SpectralSummary s;
    s.lambda_min = ev(0);
    s.lambda_max = ev(ev.size() - 1);
    s.spectral_norm = std::max(std::abs(s.lambda_min), std::abs(s.lambda_max));
    s.capital_lambda = -s.lambda_min * s.lambda_max;
    return s;
}

} // namespace evs
