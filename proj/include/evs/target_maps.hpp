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
 * Gridded target densities on [-1, 1]^M and the triangular (Knothe-Rosenblatt)
 * transport map from the uniform distribution on [0, 1]^M.
 *
 * Cells are indexed row-major with coordinate 0 most significant. Cell i along
 * an axis spans [-1 + i w, -1 + (i + 1) w] with w = 2 / R. The pushforward of
 * the map is exactly the piecewise-constant grid density.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "evs/error.hpp"
#include "evs/rng.hpp"
#include "evs/sample_set.hpp"

namespace evs {

using PointFunction = std::function<double(std::span<const double>)>;

/// Resolution per axis used when none is given: 256 for M <= 2, 64 for M = 3,
/// 32 for M = 4, about 2^20 cells beyond.
inline int default_resolution(int dims) {
    if (dims <= 2) {
        return 256;
    }
    if (dims == 3) {
        return 64;
    }
    if (dims == 4) {
        return 32;
    }
    return std::max(4, static_cast<int>(std::pow(2.0, 20.0 / dims)));
}

struct GridDensity {
    int dims = 1;
    int resolution = 2;
    std::vector<double> values;
    double cell_volume = 1.0;
    /// Canonical coordinate y corresponds to original coordinate half_width * y.
    double half_width = 1.0;
    /// Probability mass of the source pdf inside the original box (1 unless truncated).
    double retained_mass = 1.0;

    [[nodiscard]] double cell_width() const { return 2.0 / resolution; }
    [[nodiscard]] std::size_t num_cells() const { return values.size(); }
    [[nodiscard]] double cell_center(std::size_t i) const {
        return -1.0 + (static_cast<double>(i) + 0.5) * cell_width();
    }

    /// Per-axis cell indices of flat index `flat`.
    [[nodiscard]] std::vector<std::size_t> unflatten(std::size_t flat) const {
        std::vector<std::size_t> idx(static_cast<std::size_t>(dims));
        for (int d = dims - 1; d >= 0; --d) {
            idx[static_cast<std::size_t>(d)] = flat % static_cast<std::size_t>(resolution);
            flat /= static_cast<std::size_t>(resolution);
        }
        return idx;
    }

    [[nodiscard]] double total_mass() const {
        double acc = 0.0;
        for (double v : values) {
            acc += v;
        }
        return acc * cell_volume;
    }

    void validate() const {
        detail::require(dims >= 1, "GridDensity: dims must be positive");
        detail::require(resolution >= 1, "GridDensity: resolution must be positive");
        std::size_t expected = 1;
        for (int d = 0; d < dims; ++d) {
            expected *= static_cast<std::size_t>(resolution);
        }
        detail::require(values.size() == expected, "GridDensity: value count must be R^M");
        for (double v : values) {
            detail::require(std::isfinite(v) && v >= 0.0, "GridDensity: values must be finite and >= 0");
        }
        detail::require(std::abs(total_mass() - 1.0) <= 1e-9, "GridDensity: total mass must be 1");
    }
};

namespace detail {

inline std::size_t ipow(std::size_t base, int e) {
    std::size_t r = 1;
    for (int i = 0; i < e; ++i) {
        r *= base;
    }
    return r;
}

inline GridDensity normalize_grid(int dims, int resolution, std::vector<double> raw, double half_width,
                                  double retained_mass) {
    GridDensity g;
    g.dims = dims;
    g.resolution = resolution;
    g.cell_volume = std::pow(2.0 / resolution, dims);
    g.half_width = half_width;
    g.retained_mass = retained_mass;
    double sum = 0.0;
    for (double v : raw) {
        sum += v;
    }
    require(sum > 0.0, "grid density: zero total mass");
    const double scale = 1.0 / (sum * g.cell_volume);
    for (auto &v : raw) {
        v *= scale;
    }
    g.values = std::move(raw);
    return g;
}

/// Evaluates `pdf(half_width * y)` at every cell midpoint y of [-1, 1]^M.
inline std::vector<double> evaluate_midpoints(const PointFunction &pdf, int dims, int resolution,
                                              double half_width) {
    const std::size_t total = ipow(static_cast<std::size_t>(resolution), dims);
    std::vector<double> raw(total);
    std::vector<double> pt(static_cast<std::size_t>(dims));
    const double w = 2.0 / resolution;
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        for (int d = dims - 1; d >= 0; --d) {
            const auto i = rem % static_cast<std::size_t>(resolution);
            rem /= static_cast<std::size_t>(resolution);
            pt[static_cast<std::size_t>(d)] = half_width * (-1.0 + (static_cast<double>(i) + 0.5) * w);
        }
        const double v = pdf(pt);
        require(std::isfinite(v), "grid density: pdf is not finite at a grid node");
        require(v >= 0.0, "grid density: pdf is negative at a grid node");
        raw[flat] = v;
    }
    return raw;
}

} // namespace detail

/// Midpoint-rule discretization of a nonnegative pdf on [-1, 1]^M, normalized
/// to unit mass.
inline GridDensity build_grid_density(const PointFunction &pdf, int dims, int resolution) {
    detail::require(dims >= 1, "build_grid_density: dims must be positive");
    detail::require(resolution >= 1, "build_grid_density: resolution must be positive");
    auto raw = detail::evaluate_midpoints(pdf, dims, resolution, 1.0);
    return detail::normalize_grid(dims, resolution, std::move(raw), 1.0, 1.0);
}

/// Restricts a pdf on R^M to the hypercube [-(k + k0), k + k0]^M, renormalizes,
/// and rescales the cube onto [-1, 1]^M. `retained_mass` records the midpoint
/// estimate of the source mass inside the cube (assuming `pdf` integrates to 1).
inline GridDensity truncate_density(const PointFunction &pdf, int dims, int k, int k0, int resolution) {
    detail::require(dims >= 1, "truncate_density: dims must be positive");
    detail::require(k >= 0 && k0 >= 0 && k + k0 >= 1, "truncate_density: need k, k0 >= 0 and k + k0 >= 1");
    detail::require(resolution >= 1, "truncate_density: resolution must be positive");
    const double half = static_cast<double>(k + k0);
    auto raw = detail::evaluate_midpoints(pdf, dims, resolution, half);
    double sum = 0.0;
    for (double v : raw) {
        sum += v;
    }
    const double mass = sum * std::pow(2.0 * half / resolution, dims);
    detail::require(mass > 0.0, "truncate_density: zero mass on the hypercube");
    return detail::normalize_grid(dims, resolution, std::move(raw), half, mass);
}

/// Smallest k0 >= 0 such that the pdf has positive mass on [-(1 + k0), 1 + k0]^M.
inline int first_support_offset(const PointFunction &pdf, int dims, int resolution, int max_k0 = 64) {
    for (int k0 = 0; k0 <= max_k0; ++k0) {
        const auto raw = detail::evaluate_midpoints(pdf, dims, resolution, 1.0 + k0);
        for (double v : raw) {
            if (v > 0.0) {
                return k0;
            }
        }
    }
    throw ValidationError("first_support_offset: no support found up to k0 = " + std::to_string(max_k0));
}

// ---------------------------------------------------------------------------
// Triangular map
// ---------------------------------------------------------------------------

class TriangularMap {
  public:
    [[nodiscard]] int dims() const { return dims_; }
    [[nodiscard]] int resolution() const { return resolution_; }
    [[nodiscard]] double cell_width() const { return 2.0 / resolution_; }

    /// Number of conditioning slices for coordinate k (R^k).
    [[nodiscard]] std::size_t num_slices(int k) const {
        return detail::ipow(static_cast<std::size_t>(resolution_), k);
    }

    /// CDF at the R + 1 cell edges of coordinate k given the conditioning
    /// cells of coordinates 0..k-1 (flattened). Zero-mass slices return the
    /// unconditional marginal.
    [[nodiscard]] std::span<const double> conditional_cdf(int k, std::size_t slice) const {
        const auto r1 = static_cast<std::size_t>(resolution_ + 1);
        const auto kk = static_cast<std::size_t>(k);
        if (!slice_mass_[kk][slice]) {
            return marginal_cdf(k);
        }
        return std::span<const double>(cdf_[kk]).subspan(slice * r1, r1);
    }

    [[nodiscard]] bool slice_has_mass(int k, std::size_t slice) const {
        return slice_mass_[static_cast<std::size_t>(k)][slice];
    }

    /// Unconditional marginal CDF of coordinate k at the R + 1 cell edges.
    [[nodiscard]] std::span<const double> marginal_cdf(int k) const {
        return marginal_[static_cast<std::size_t>(k)];
    }

    /// Inverse of a CDF table at u in [0, 1]. Flat regions resolve to their
    /// left edge. `cell` receives the cell containing the result.
    [[nodiscard]] double invert(std::span<const double> cdf, double u, std::size_t *cell = nullptr) const {
        const auto r = static_cast<std::size_t>(resolution_);
        std::size_t j = 0;
        double frac = 0.0;
        if (u <= 0.0) {
            while (j + 1 < r && cdf[j + 1] <= 0.0) {
                ++j;
            }
        } else {
            const auto it = std::lower_bound(cdf.begin() + 1, cdf.end(), u);
            j = std::min(static_cast<std::size_t>(it - (cdf.begin() + 1)), r - 1);
            const double lo = cdf[j], hi = cdf[j + 1];
            frac = hi > lo ? std::clamp((u - lo) / (hi - lo), 0.0, 1.0) : 0.0;
        }
        if (cell != nullptr) {
            *cell = j;
        }
        return std::clamp(-1.0 + (static_cast<double>(j) + frac) * cell_width(), -1.0, 1.0);
    }

    /// Maps x in [0, 1]^M to y in [-1, 1]^M. Coordinate k depends on x_0..x_k only.
    [[nodiscard]] std::vector<double> forward(std::span<const double> x) const {
        detail::require(x.size() == static_cast<std::size_t>(dims_),
                        "map_forward: expected " + std::to_string(dims_) + " coordinates");
        for (double v : x) {
            detail::require(v >= 0.0 && v <= 1.0, "map_forward: input must lie in the unit cube");
        }
        std::vector<double> y(x.size());
        forward_into(x, y);
        return y;
    }

    /// Unchecked forward map into `y`.
    void forward_into(std::span<const double> x, std::span<double> y) const {
        std::size_t slice = 0;
        for (int k = 0; k < dims_; ++k) {
            std::size_t cell = 0;
            y[static_cast<std::size_t>(k)] =
                invert(conditional_cdf(k, slice), x[static_cast<std::size_t>(k)], &cell);
            slice = slice * static_cast<std::size_t>(resolution_) + cell;
        }
    }

    friend TriangularMap build_triangular_map(const GridDensity &density);

  private:
    int dims_ = 0;
    int resolution_ = 0;
    std::vector<std::vector<double>> cdf_;
    std::vector<std::vector<bool>> slice_mass_;
    std::vector<std::vector<double>> marginal_;
};

namespace detail {

inline std::vector<double> cdf_from_weights(std::span<const double> w, double total) {
    std::vector<double> c(w.size() + 1, 0.0);
    double acc = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        acc += w[j];
        c[j + 1] = acc / total;
    }
    c.back() = 1.0;
    return c;
}

} // namespace detail

/// Per-axis marginal CDFs at the cell edges, straight from the grid.
inline std::vector<std::vector<double>> grid_marginal_cdfs(const GridDensity &density) {
    const auto r = static_cast<std::size_t>(density.resolution);
    std::vector<std::vector<double>> w(static_cast<std::size_t>(density.dims), std::vector<double>(r, 0.0));
    for (std::size_t flat = 0; flat < density.values.size(); ++flat) {
        std::size_t rem = flat;
        for (int d = density.dims - 1; d >= 0; --d) {
            w[static_cast<std::size_t>(d)][rem % r] += density.values[flat];
            rem /= r;
        }
    }
    std::vector<std::vector<double>> out;
    for (const auto &wd : w) {
        double total = 0.0;
        for (double v : wd) {
            total += v;
        }
        out.push_back(detail::cdf_from_weights(wd, total));
    }
    return out;
}

/// Piecewise-linear evaluation of an edge-CDF table at y in [-1, 1].
inline double cdf_at(std::span<const double> cdf, double y) {
    const auto r = cdf.size() - 1;
    const double t = (y + 1.0) / 2.0 * static_cast<double>(r);
    if (t <= 0.0) {
        return 0.0;
    }
    if (t >= static_cast<double>(r)) {
        return 1.0;
    }
    const auto j = static_cast<std::size_t>(t);
    const double frac = t - static_cast<double>(j);
    return cdf[j] + frac * (cdf[j + 1] - cdf[j]);
}

inline TriangularMap build_triangular_map(const GridDensity &density) {
    density.validate();
    TriangularMap map;
    map.dims_ = density.dims;
    map.resolution_ = density.resolution;
    const auto r = static_cast<std::size_t>(density.resolution);
    const auto m = static_cast<std::size_t>(density.dims);

    // Partial marginals: level k sums out coordinates > k.
    std::vector<std::vector<double>> partial(m);
    partial[m - 1] = density.values;
    for (std::size_t k = m - 1; k-- > 0;) {
        const auto &next = partial[k + 1];
        auto &cur = partial[k];
        cur.assign(next.size() / r, 0.0);
        for (std::size_t i = 0; i < cur.size(); ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < r; ++j) {
                acc += next[i * r + j];
            }
            cur[i] = acc;
        }
    }
    map.marginal_ = grid_marginal_cdfs(density);
    map.cdf_.resize(m);
    map.slice_mass_.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t slices = partial[k].size() / r;
        auto &table = map.cdf_[k];
        table.assign(slices * (r + 1), 0.0);
        map.slice_mass_[k].assign(slices, false);
        for (std::size_t s = 0; s < slices; ++s) {
            const std::span<const double> w(partial[k].data() + s * r, r);
            double total = 0.0;
            for (double v : w) {
                total += v;
            }
            if (total <= 0.0) {
                continue;
            }
            map.slice_mass_[k][s] = true;
            const auto c = detail::cdf_from_weights(w, total);
            std::copy(c.begin(), c.end(), table.begin() + static_cast<std::ptrdiff_t>(s * (r + 1)));
        }
    }
    return map;
}

inline std::vector<double> map_forward(const TriangularMap &map, std::span<const double> x) {
    return map.forward(x);
}

/// N pushforward samples of independent uniform draws; row i uses the keyed
/// inputs (seed, i, d).
inline SampleSet sample_via_map(const TriangularMap &map, std::size_t n, std::uint64_t seed) {
    detail::require(n >= 1, "sample_via_map: N must be >= 1");
    const auto m = static_cast<std::size_t>(map.dims());
    SampleSet out(n, m);
    out.meta.seed = seed;
    out.meta.mode = SampleMode::pushforward;
    std::vector<double> x(m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t d = 0; d < m; ++d) {
            x[d] = rng::uniform(seed, rng::Stream::inputs, i, d);
        }
        map.forward_into(x, std::span<double>(out.values).subspan(i * m, m));
    }
    return out;
}

/// Mean and covariance of the piecewise-constant grid density (row-major M x M).
struct GridMoments {
    std::vector<double> mean;
    std::vector<double> covariance;

    [[nodiscard]] double correlation(std::size_t i, std::size_t j) const {
        const auto m = mean.size();
        return covariance[i * m + j] / std::sqrt(covariance[i * m + i] * covariance[j * m + j]);
    }
};

inline GridMoments grid_moments(const GridDensity &density) {
    const auto m = static_cast<std::size_t>(density.dims);
    GridMoments mom{std::vector<double>(m, 0.0), std::vector<double>(m * m, 0.0)};
    std::vector<double> second(m * m, 0.0);
    const double w = density.cell_width();
    for (std::size_t flat = 0; flat < density.values.size(); ++flat) {
        const double p = density.values[flat] * density.cell_volume;
        if (p == 0.0) {
            continue;
        }
        const auto idx = density.unflatten(flat);
        for (std::size_t a = 0; a < m; ++a) {
            const double ca = density.cell_center(idx[a]);
            mom.mean[a] += p * ca;
            for (std::size_t b = 0; b < m; ++b) {
                second[a * m + b] += p * ca * density.cell_center(idx[b]);
            }
            second[a * m + a] += p * w * w / 12.0;
        }
    }
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) {
            mom.covariance[a * m + b] = second[a * m + b] - mom.mean[a] * mom.mean[b];
        }
    }
    return mom;
}

} // namespace evs
