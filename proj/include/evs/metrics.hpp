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

/// Wasserstein-1 distances and Kolmogorov-Smirnov statistics between sample sets.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "evs/error.hpp"
#include "evs/rng.hpp"
#include "evs/sample_set.hpp"

namespace evs {

inline constexpr std::size_t kMaxExactW1 = 512;

struct MetricReport {
    std::string name;
    double value = 0.0;
    std::size_t n_a = 0;
    std::size_t n_b = 0;
    std::map<std::string, double> params;
};

/// Exact W1 between two 1D empirical measures. Equal sizes use the sorted
/// coupling; unequal sizes integrate |Q_a(u) - Q_b(u)| over the merged
/// quantile grid.
inline double w1_1d(std::span<const double> a, std::span<const double> b) {
    detail::require(!a.empty() && !b.empty(), "w1_1d: samples must be nonempty");
    std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa.size() == sb.size()) {
        double acc = 0.0;
        for (std::size_t i = 0; i < sa.size(); ++i) {
            acc += std::abs(sa[i] - sb[i]);
        }
        return acc / static_cast<double>(sa.size());
    }
    const auto na = static_cast<double>(sa.size()), nb = static_cast<double>(sb.size());
    std::size_t i = 0, j = 0;
    double u = 0.0, acc = 0.0;
    while (i < sa.size() && j < sb.size()) {
        const double next_a = static_cast<double>(i + 1) / na;
        const double next_b = static_cast<double>(j + 1) / nb;
        const double next = std::min(next_a, next_b);
        acc += (next - u) * std::abs(sa[i] - sb[j]);
        u = next;
        if (next_a <= next) {
            ++i;
        }
        if (next_b <= next) {
            ++j;
        }
    }
    return acc;
}

namespace detail {

/// Minimum-cost perfect assignment (shortest augmenting paths with
/// potentials), O(n^3). cost is row-major n x n. Returns the total cost.
inline double assignment_cost(const std::vector<double> &cost, std::size_t n) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j] != 0) {
                    continue;
                }
                const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j] != 0) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    double total = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
        total += cost[(p[j] - 1) * n + (j - 1)];
    }
    return total;
}

inline double euclidean(std::span<const double> x, std::span<const double> y) {
    double acc = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double d = x[k] - y[k];
        acc += d * d;
    }
    return std::sqrt(acc);
}

} // namespace detail

/// Exact W1 between equal-size empirical measures with Euclidean cost.
inline double w1_exact(const SampleSet &a, const SampleSet &b) {
    detail::require(a.rows >= 1 && b.rows >= 1, "w1_exact: samples must be nonempty");
    detail::require(a.dims == b.dims, "w1_exact: dimension mismatch");
    detail::require(a.rows == b.rows, "w1_exact: sample counts differ; use w1_sliced for unequal sizes");
    detail::require(a.rows <= kMaxExactW1,
                    "w1_exact: N exceeds " + std::to_string(kMaxExactW1) + "; use w1_sliced");
    const std::size_t n = a.rows;
    std::vector<double> cost(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            cost[i * n + j] = detail::euclidean(a.row(i), b.row(j));
        }
    }
    return detail::assignment_cost(cost, n) / static_cast<double>(n);
}

/// Mean of w1_1d over random unit-vector projections.
inline double w1_sliced(const SampleSet &a, const SampleSet &b, int n_projections, std::uint64_t seed) {
    detail::require(a.rows >= 1 && b.rows >= 1, "w1_sliced: samples must be nonempty");
    detail::require(a.dims == b.dims, "w1_sliced: dimension mismatch");
    detail::require(n_projections >= 1, "w1_sliced: need at least one projection");
    if (a.dims == 1) {
        // every projection is +-1 and W1 is reflection invariant
        return w1_1d(a.values, b.values);
    }
    std::vector<double> dir(a.dims), pa(a.rows), pb(b.rows);
    double acc = 0.0;
    for (int p = 0; p < n_projections; ++p) {
        double norm2 = 0.0;
        for (std::size_t d = 0; d < a.dims; ++d) {
            dir[d] = rng::normal(seed, rng::Stream::projections, static_cast<std::uint64_t>(p), d);
            norm2 += dir[d] * dir[d];
        }
        if (norm2 == 0.0) {
            dir[0] = norm2 = 1.0;
        }
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto &v : dir) {
            v *= inv;
        }
        for (std::size_t i = 0; i < a.rows; ++i) {
            double s = 0.0;
            for (std::size_t d = 0; d < a.dims; ++d) {
                s += a.at(i, d) * dir[d];
            }
            pa[i] = s;
        }
        for (std::size_t i = 0; i < b.rows; ++i) {
            double s = 0.0;
            for (std::size_t d = 0; d < b.dims; ++d) {
                s += b.at(i, d) * dir[d];
            }
            pb[i] = s;
        }
        acc += w1_1d(pa, pb);
    }
    return acc / n_projections;
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::span<const double> a, std::span<const double> b) {
    detail::require(!a.empty() && !b.empty(), "ks_statistic: samples must be nonempty");
    std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    const auto na = static_cast<double>(sa.size()), nb = static_cast<double>(sb.size());
    std::size_t i = 0, j = 0;
    double best = 0.0;
    while (i < sa.size() || j < sb.size()) {
        double x;
        if (j >= sb.size() || (i < sa.size() && sa[i] <= sb[j])) {
            x = sa[i];
        } else {
            x = sb[j];
        }
        while (i < sa.size() && sa[i] <= x) {
            ++i;
        }
        while (j < sb.size() && sb[j] <= x) {
            ++j;
        }
        best = std::max(best, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return best;
}

/// One-sample KS statistic of `a` against a continuous CDF.
template <typename Cdf>
double ks_statistic_vs(std::span<const double> a, Cdf &&cdf) {
    detail::require(!a.empty(), "ks_statistic_vs: samples must be nonempty");
    std::vector<double> s(a.begin(), a.end());
    std::sort(s.begin(), s.end());
    const auto n = static_cast<double>(s.size());
    double best = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double f = cdf(s[i]);
        best = std::max({best, std::abs(static_cast<double>(i + 1) / n - f), std::abs(f - static_cast<double>(i) / n)});
    }
    return best;
}

inline std::vector<double> ks_marginals(const SampleSet &a, const SampleSet &b) {
    detail::require(a.rows >= 1 && b.rows >= 1, "ks_marginals: samples must be nonempty");
    detail::require(a.dims == b.dims, "ks_marginals: dimension mismatch");
    std::vector<double> out(a.dims);
    for (std::size_t d = 0; d < a.dims; ++d) {
        out[d] = ks_statistic(a.column(d), b.column(d));
    }
    return out;
}

/// Pearson correlation of two columns.
inline double sample_correlation(const SampleSet &s, std::size_t i, std::size_t j) {
    const auto n = static_cast<double>(s.rows);
    double mi = 0.0, mj = 0.0;
    for (std::size_t r = 0; r < s.rows; ++r) {
        mi += s.at(r, i);
        mj += s.at(r, j);
    }
    mi /= n;
    mj /= n;
    double cij = 0.0, cii = 0.0, cjj = 0.0;
    for (std::size_t r = 0; r < s.rows; ++r) {
        const double di = s.at(r, i) - mi, dj = s.at(r, j) - mj;
        cij += di * dj;
        cii += di * di;
        cjj += dj * dj;
    }
    return cij / std::sqrt(cii * cjj);
}

} // namespace evs
