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
 * Counter-based random numbers.
 *
 * Every random draw in the toolkit is a pure function of a key tuple
 * (seed, stream, i, j, k). Results therefore do not depend on evaluation
 * order or thread scheduling. The mixer is the splitmix64 finalizer applied
 * to each key word in turn.
 */

#include <cmath>
#include <cstdint>
#include <numbers>

namespace evs::rng {

/// Stream tags keep draws for different purposes independent.
enum class Stream : std::uint64_t {
    inputs = 0x1,
    shots = 0x2,
    gaussian = 0x3,
    projections = 0x4,
    init = 0x5,
    child = 0x6,
};

constexpr std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27U)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31U);
}

constexpr std::uint64_t key(std::uint64_t seed, Stream stream, std::uint64_t i = 0,
                            std::uint64_t j = 0, std::uint64_t k = 0) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
    h = splitmix64(h ^ i);
    h = splitmix64(h ^ (j + 0x632be59bd9b4e019ULL));
    h = splitmix64(h ^ (k + 0x8cb92ba72f3d8dd7ULL));
    return h;
}

/// Child seed for chunk `index` of a computation keyed by `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return key(seed, Stream::child, index);
}

/// Uniform double in [0, 1) built from the top 53 bits.
constexpr double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11U) * 0x1.0p-53;
}

inline double uniform(std::uint64_t seed, Stream stream, std::uint64_t i = 0, std::uint64_t j = 0,
                      std::uint64_t k = 0) {
    return to_unit(key(seed, stream, i, j, k));
}

/// Standard normal draw (Box-Muller on two keyed uniforms).
inline double normal(std::uint64_t seed, Stream stream, std::uint64_t i = 0, std::uint64_t j = 0,
                     std::uint64_t k = 0) {
    const std::uint64_t base = key(seed, stream, i, j, k);
    const double u1 = 1.0 - to_unit(splitmix64(base ^ 0x1ULL)); // (0, 1]
    const double u2 = to_unit(splitmix64(base ^ 0x2ULL));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace evs::rng
