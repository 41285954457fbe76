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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "evs/error.hpp"

namespace evs {

enum class SampleMode { exact, shots, gaussian, pushforward };

inline const char *to_string(SampleMode m) {
    switch (m) {
    case SampleMode::exact:
        return "exact";
    case SampleMode::shots:
        return "shots";
    case SampleMode::gaussian:
        return "gaussian";
    case SampleMode::pushforward:
        return "pushforward";
    }
    return "?";
}

inline SampleMode sample_mode_from_string(const std::string &s) {
    for (SampleMode m : {SampleMode::exact, SampleMode::shots, SampleMode::gaussian, SampleMode::pushforward}) {
        if (s == to_string(m)) {
            return m;
        }
    }
    throw ValidationError("unknown sample mode '" + s + "'");
}

struct SampleMetadata {
    std::uint64_t seed = 0;
    SampleMode mode = SampleMode::exact;
    int shots = 0;        // shots per observable per sample (mode == shots)
    double epsilon = 0.0; // Gaussian noise level (mode == gaussian)
    std::string model_id;
};

/// Row-major N x M matrix of samples.
struct SampleSet {
    std::size_t rows = 0;
    std::size_t dims = 0;
    std::vector<double> values;
    SampleMetadata meta;

    SampleSet() = default;
    SampleSet(std::size_t n, std::size_t m) : rows(n), dims(m), values(n * m, 0.0) {}

    static SampleSet from_values(std::size_t n, std::size_t m, std::vector<double> v) {
        detail::require(v.size() == n * m, "SampleSet: value count must equal rows * dims");
        SampleSet s;
        s.rows = n;
        s.dims = m;
        s.values = std::move(v);
        return s;
    }

    double &at(std::size_t i, std::size_t j) { return values[i * dims + j]; }
    [[nodiscard]] double at(std::size_t i, std::size_t j) const { return values[i * dims + j]; }

    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return std::span<const double>(values).subspan(i * dims, dims);
    }

    [[nodiscard]] std::vector<double> column(std::size_t j) const {
        std::vector<double> c(rows);
        for (std::size_t i = 0; i < rows; ++i) {
            c[i] = at(i, j);
        }
        return c;
    }

    [[nodiscard]] bool all_finite() const {
        for (double v : values) {
            if (!std::isfinite(v)) {
                return false;
            }
        }
        return true;
    }
};

} // namespace evs
