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

/// Analytic target families used by the CLI and the test suites.

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "evs/error.hpp"
#include "evs/target_maps.hpp"

namespace evs::densities {

inline double normal_pdf(double x, double mean = 0.0, double sd = 1.0) {
    const double z = (x - mean) / sd;
    return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline PointFunction uniform() {
    return [](std::span<const double>) { return 1.0; };
}

struct GaussianMixture1D {
    std::vector<double> weights{0.5, 0.5};
    std::vector<double> means{-0.5, 0.5};
    std::vector<double> sds{0.15, 0.15};

    [[nodiscard]] double operator()(double x) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i] * normal_pdf(x, means[i], sds[i]);
        }
        return acc;
    }

    [[nodiscard]] PointFunction pdf() const {
        return [mix = *this](std::span<const double> y) { return mix(y[0]); };
    }
};

/// Two well-separated modes on [-1, 1].
inline GaussianMixture1D bimodal() { return {}; }

/// Standard bivariate normal with correlation rho.
inline PointFunction correlated_gaussian_2d(double rho) {
    detail::require(rho > -1.0 && rho < 1.0, "correlated_gaussian_2d: |rho| must be < 1");
    return [rho](std::span<const double> y) {
        const double q = (y[0] * y[0] - 2.0 * rho * y[0] * y[1] + y[1] * y[1]) / (1.0 - rho * rho);
        return std::exp(-0.5 * q) / (2.0 * std::numbers::pi * std::sqrt(1.0 - rho * rho));
    };
}

/// Product of independent standard normals.
inline PointFunction standard_normal() {
    return [](std::span<const double> y) {
        double acc = 1.0;
        for (double v : y) {
            acc *= normal_pdf(v);
        }
        return acc;
    };
}

/// Independent Gaussian bumps per axis, for product-structure tests.
inline PointFunction independent_bumps(std::vector<double> means, std::vector<double> sds) {
    return [means = std::move(means), sds = std::move(sds)](std::span<const double> y) {
        double acc = 1.0;
        for (std::size_t d = 0; d < y.size(); ++d) {
            acc *= normal_pdf(y[d], means[d % means.size()], sds[d % sds.size()]);
        }
        return acc;
    };
}

/// Dirichlet(alpha) density of the first M - 1 coordinates u, zero off the simplex.
inline PointFunction dirichlet(std::vector<double> alpha) {
    detail::require(alpha.size() >= 2, "dirichlet: need at least two concentration parameters");
    double log_norm = std::lgamma([&] {
        double s = 0.0;
        for (double a : alpha) {
            detail::require(a > 0.0, "dirichlet: concentrations must be positive");
            s += a;
        }
        return s;
    }());
    for (double a : alpha) {
        log_norm -= std::lgamma(a);
    }
    return [alpha = std::move(alpha), log_norm](std::span<const double> u) {
        double rest = 1.0;
        double logp = log_norm;
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (u[i] <= 0.0) {
                return 0.0;
            }
            rest -= u[i];
            logp += (alpha[i] - 1.0) * std::log(u[i]);
        }
        if (rest <= 0.0) {
            return 0.0;
        }
        logp += (alpha.back() - 1.0) * std::log(rest);
        return std::exp(logp);
    };
}

} // namespace evs::densities
