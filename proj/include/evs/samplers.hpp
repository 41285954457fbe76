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
 * Exact and finite-shot expectation-value sampling.
 *
 * Input row i, coordinate d is rng::uniform(seed, inputs, i, d); shot s of
 * observable m in row i uses rng::uniform(seed, shots, i, m, s). Rows are
 * independent, so results do not depend on the thread count.
 */

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "evs/error.hpp"
#include "evs/generators.hpp"
#include "evs/quantum_core.hpp"
#include "evs/rng.hpp"
#include "evs/sample_set.hpp"

namespace evs {

struct ShotConfig {
    int shots = 1; // t, per observable per sample

    [[nodiscard]] long long total(int output_dim) const { return static_cast<long long>(shots) * output_dim; }
};

/// Worker threads from EVS_THREADS (default 1).
inline unsigned thread_count() {
    if (const char *env = std::getenv("EVS_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) {
            return static_cast<unsigned>(v);
        }
    }
    return 1;
}

namespace detail {

template <typename F>
void parallel_rows(std::size_t n, F &&body) {
    const unsigned t = std::min<std::size_t>(thread_count(), std::max<std::size_t>(n, 1));
    if (t <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + t - 1) / t;
    for (unsigned w = 0; w < t; ++w) {
        const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) {
                body(i);
            }
        });
    }
    for (auto &th : pool) {
        th.join();
    }
}

inline std::vector<double> input_row(std::uint64_t seed, std::size_t i, int dims) {
    std::vector<double> x(static_cast<std::size_t>(dims));
    for (std::size_t d = 0; d < x.size(); ++d) {
        x[d] = rng::uniform(seed, rng::Stream::inputs, i, d);
    }
    return x;
}

/// Distinct eigenvalues of an observable and the eigenvectors spanning each.
struct Measurement {
    std::vector<double> outcomes;
    std::vector<std::vector<Eigen::Index>> columns;
    DenseMatrix vectors;

    explicit Measurement(const Observable &obs) {
        auto es = eigensystem(obs);
        vectors = std::move(es.vectors);
        const double scale = std::max(1.0, es.values.cwiseAbs().maxCoeff());
        for (Eigen::Index j = 0; j < es.values.size(); ++j) {
            const double v = es.values(j);
            if (outcomes.empty() || v - outcomes.back() > 1e-9 * scale) {
                outcomes.push_back(v);
                columns.emplace_back();
            }
            columns.back().push_back(j);
        }
    }

    /// Born probabilities of each distinct outcome.
    [[nodiscard]] std::vector<double> probabilities(const StateVector &s) const {
        std::vector<double> p(outcomes.size(), 0.0);
        const auto psi = s.amplitudes();
        double total = 0.0;
        for (std::size_t k = 0; k < outcomes.size(); ++k) {
            for (Eigen::Index col : columns[k]) {
                cplx ov{};
                for (std::size_t b = 0; b < psi.size(); ++b) {
                    ov += std::conj(vectors(static_cast<Eigen::Index>(b), col)) * psi[b];
                }
                p[k] += std::norm(ov);
            }
            total += p[k];
        }
        for (auto &v : p) {
            v /= total;
        }
        return p;
    }
};

/// Outcome index for a uniform draw u; zero-probability outcomes are never chosen.
inline std::size_t draw_outcome(const std::vector<double> &cumulative, double u) {
    for (std::size_t k = 0; k < cumulative.size(); ++k) {
        if (u < cumulative[k]) {
            return k;
        }
    }
    std::size_t k = cumulative.size() - 1;
    while (k > 0 && cumulative[k] == cumulative[k - 1]) {
        --k;
    }
    return k;
}

} // namespace detail

/// Exact expectations at N keyed uniform inputs.
inline SampleSet sample_exact(const EvsModel &model, std::size_t n, std::uint64_t seed) {
    model.validate();
    detail::require(n >= 1, "sample_exact: N must be >= 1");
    const auto m = static_cast<std::size_t>(model.output_dim);
    SampleSet out(n, m);
    out.meta = {seed, SampleMode::exact, 0, 0.0, model.id};
    detail::parallel_rows(n, [&](std::size_t i) {
        const auto x = detail::input_row(seed, i, model.input_dim);
        const StateVector s = model.prepare(x);
        for (std::size_t j = 0; j < m; ++j) {
            out.at(i, j) = expectation(s, model.observables[j]);
        }
    });
    return out;
}

/// Average of t eigenvalue draws per entry with Born probabilities from the
/// prepared state. Inputs match sample_exact for the same seed.
inline SampleSet sample_with_shots(const EvsModel &model, std::size_t n, const ShotConfig &cfg, std::uint64_t seed) {
    model.validate();
    detail::require(n >= 1, "sample_with_shots: N must be >= 1");
    detail::require(cfg.shots >= 1, "sample_with_shots: shots per observable must be >= 1");
    const auto m = static_cast<std::size_t>(model.output_dim);
    std::vector<detail::Measurement> meas;
    meas.reserve(m);
    for (const auto &o : model.observables) {
        meas.emplace_back(o);
    }
    SampleSet out(n, m);
    out.meta = {seed, SampleMode::shots, cfg.shots, 0.0, model.id};
    detail::parallel_rows(n, [&](std::size_t i) {
        const auto x = detail::input_row(seed, i, model.input_dim);
        const StateVector s = model.prepare(x);
        for (std::size_t j = 0; j < m; ++j) {
            const auto p = meas[j].probabilities(s);
            std::vector<double> cum(p.size());
            double acc = 0.0;
            for (std::size_t k = 0; k < p.size(); ++k) {
                acc += p[k];
                cum[k] = acc;
            }
            std::vector<long long> counts(p.size(), 0);
            for (int shot = 0; shot < cfg.shots; ++shot) {
                const double u = rng::uniform(seed, rng::Stream::shots, i, j, static_cast<std::uint64_t>(shot));
                ++counts[detail::draw_outcome(cum, u)];
            }
            double sum = 0.0;
            for (std::size_t k = 0; k < p.size(); ++k) {
                sum += static_cast<double>(counts[k]) * meas[j].outcomes[k];
            }
            out.at(i, j) = sum / cfg.shots;
        }
    });
    return out;
}

/// Adds independent N(0, epsilon^2) noise to every entry; epsilon = 0 is the identity.
inline SampleSet gaussian_noise_model(const SampleSet &samples, double epsilon, std::uint64_t seed) {
    detail::require(std::isfinite(epsilon) && epsilon >= 0.0, "gaussian_noise_model: epsilon must be >= 0");
    SampleSet out = samples;
    out.meta.mode = SampleMode::gaussian;
    out.meta.epsilon = epsilon;
    out.meta.seed = seed;
    if (epsilon == 0.0) {
        return out;
    }
    for (std::size_t i = 0; i < out.rows; ++i) {
        for (std::size_t j = 0; j < out.dims; ++j) {
            out.at(i, j) += epsilon * rng::normal(seed, rng::Stream::gaussian, i, j);
        }
    }
    return out;
}

/// T = ceil(c M ||O|| / epsilon^2). A relative slack of 1e-12 absorbs
/// rounding so that exact products are not pushed to the next integer.
inline long long required_shots(int output_dim, double spectral_norm, double epsilon, double c = 1.0) {
    detail::require(epsilon > 0.0 && std::isfinite(epsilon), "required_shots: epsilon must be > 0");
    detail::require(output_dim >= 1, "required_shots: M must be >= 1");
    detail::require(spectral_norm >= 0.0 && c > 0.0, "required_shots: norm must be >= 0 and c > 0");
    const double t = c * output_dim * spectral_norm / (epsilon * epsilon);
    return static_cast<long long>(std::ceil(t * (1.0 - 1e-12)));
}

} // namespace evs
