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
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "evs/analysis.hpp"
#include "evs/reuploading.hpp"
#include "test_util.hpp"

namespace evs {
namespace {

using testing::Rng;

Observable pauli_combination(int n, std::span<const double> a) {
    Observable::PauliSum terms;
    for (std::size_t k = 0; k < a.size(); ++k) {
        terms.push_back(PauliTerm{a[k], pauli_string(n, k)});
    }
    return Observable::pauli(n, std::move(terms));
}

/// Reuploading weights with every data weight set to 1, so f is 2 pi periodic
/// with integer frequencies.
std::vector<double> integer_spectrum_weights(Rng &rng, const ReuploadingCircuit &rc) {
    auto w = testing::random_vector(rng, rc.num_weights(), -std::numbers::pi, std::numbers::pi);
    for (int l = 0; l < rc.layers(); ++l) {
        for (int m = 1; m <= rc.data_dim(); ++m) {
            w[rc.weight_index(m, l)] = 1.0;
        }
    }
    return w;
}

std::function<double(std::span<const double>)> model_function(const ReuploadingCircuit &rc, std::vector<double> w) {
    const auto obs = amplitude_z_observable();
    return [&rc, w = std::move(w), obs](std::span<const double> x) {
        return expectation(run_circuit(rc.circuit(), w, x), obs);
    };
}

TEST(PrimaryMap, IdentityComponentIsOne) {
    Rng rng(1);
    for (int t = 0; t < 20; ++t) {
        const int n = testing::uniform_int(rng, 1, 3);
        const auto c = testing::random_circuit(rng, n, 12, 2);
        const auto w = testing::random_vector(rng, c.num_weights(), -3, 3);
        const auto x = testing::random_vector(rng, 2, 0, 1);
        const auto g = primary_map_eval(c, w, x);
        ASSERT_EQ(g.size(), std::size_t{1} << (2 * n));
        EXPECT_EQ(g[0], 1.0);
    }
}

TEST(PrimaryMap, SingleQubitBlochVectorHasUnitNorm) {
    Rng rng(2);
    for (int t = 0; t < 50; ++t) {
        const auto c = testing::random_circuit(rng, 1, 8, 1);
        const auto w = testing::random_vector(rng, c.num_weights(), -3, 3);
        const auto g = primary_map_eval(c, w, std::vector<double>{testing::uniform(rng)});
        EXPECT_NEAR(std::hypot(g[1], g[2], g[3]), 1.0, 1e-10);
    }
}

TEST(PrimaryMap, ComponentsMatchPauliExpectations) {
    const StateVector plus = StateVector::from_amplitudes(1, {cplx{1 / std::numbers::sqrt2, 0}, cplx{1 / std::numbers::sqrt2, 0}});
    const auto g = primary_map_of_state(plus);
    // I X Y Z
    EXPECT_NEAR(g[1], 1.0, 1e-15);
    EXPECT_NEAR(g[2], 0.0, 1e-15);
    EXPECT_NEAR(g[3], 0.0, 1e-15);
}

TEST(PrimaryMap, ObservablesAreLinearInPrimaryMap) {
    Rng rng(3);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        const int n = testing::uniform_int(rng, 1, 3);
        const auto c = testing::random_circuit(rng, n, 15, 2);
        const auto w = testing::random_vector(rng, c.num_weights(), -3, 3);
        const auto x = testing::random_vector(rng, 2, 0, 1);
        const auto a = testing::random_vector(rng, std::size_t{1} << (2 * n), -1, 1);
        const auto g = primary_map_eval(c, w, x);
        double lin = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) {
            lin += a[k] * g[k];
        }
        worst = std::max(worst, std::abs(expectation(run_circuit(c, w, x), pauli_combination(n, a)) - lin));
    }
    EXPECT_LE(worst, 1e-10);
}

TEST(PrimaryMap, TooManyQubitsRejected) {
    const ParameterizedCircuit c(8);
    EXPECT_THROW((void)primary_map_eval(c, {}, {}), ValidationError);
}

TEST(PrimaryCovariance, ConstantEncodingHasRankZero) {
    Rng rng(4);
    const auto c = testing::random_circuit(rng, 2, 10);
    const auto w = testing::random_vector(rng, c.num_weights(), -3, 3);
    const auto r = primary_covariance(c, w, 256, 1);
    EXPECT_EQ(r.numerical_rank, 0);
}

TEST(PrimaryCovariance, SingleQubitRankAtMostThree) {
    Rng rng(5);
    for (int t = 0; t < 20; ++t) {
        const auto rc = build_reuploading(testing::uniform_int(rng, 1, 3), testing::uniform_int(rng, 1, 4));
        const auto w = testing::random_vector(rng, rc.num_weights(), -3, 3);
        const auto r = primary_covariance(rc.circuit(), w, 512, static_cast<std::uint64_t>(t));
        EXPECT_LE(r.numerical_rank, 3);
        EXPECT_EQ(r.n_qubits, 1);
    }
}

TEST(PrimaryCovariance, RankBoundedByPauliCount) {
    Rng rng(6);
    for (int t = 0; t < 10; ++t) {
        const auto c = testing::random_circuit(rng, 2, 30, 3);
        const auto w = testing::random_vector(rng, c.num_weights(), -3, 3);
        const auto r = primary_covariance(c, w, 512, static_cast<std::uint64_t>(t));
        EXPECT_LE(r.numerical_rank, 15);
    }
}

TEST(PrimaryCovariance, SymmetricPsdAndIdentityRowZero) {
    Rng rng(7);
    for (int t = 0; t < 10; ++t) {
        const auto c = testing::random_circuit(rng, 2, 20, 2);
        const auto w = testing::random_vector(rng, c.num_weights(), -3, 3);
        const auto r = primary_covariance(c, w, 300, 9);
        const auto &cov = r.covariance;
        EXPECT_LE((cov - cov.transpose()).cwiseAbs().maxCoeff(), 1e-9);
        EXPECT_GE(r.eigenvalues.back(), -1e-9);
        EXPECT_LE(cov.row(0).cwiseAbs().maxCoeff(), 1e-9);
        EXPECT_LE(cov.col(0).cwiseAbs().maxCoeff(), 1e-9);
        EXPECT_TRUE(std::is_sorted(r.eigenvalues.rbegin(), r.eigenvalues.rend()));
    }
}

TEST(PrimaryCovariance, ObservableRankNeverExceedsPrimaryRank) {
    Rng rng(8);
    const std::size_t n_samples = 400;
    for (int t = 0; t < 10; ++t) {
        const int n = testing::uniform_int(rng, 1, 2);
        const auto c = testing::random_circuit(rng, n, 20, 2);
        const auto w = testing::random_vector(rng, c.num_weights(), -3, 3);
        const auto seed = static_cast<std::uint64_t>(100 + t);
        const auto primary = primary_covariance(c, w, n_samples, seed);

        const std::size_t p = std::size_t{1} << (2 * n);
        const auto m = static_cast<std::size_t>(testing::uniform_int(rng, 1, 6));
        std::vector<Observable> obs;
        for (std::size_t j = 0; j < m; ++j) {
            obs.push_back(pauli_combination(n, testing::random_vector(rng, p, -1, 1)));
        }
        SampleSet ys(n_samples, m);
        std::vector<double> x(c.data_dim());
        for (std::size_t i = 0; i < n_samples; ++i) {
            for (std::size_t d = 0; d < x.size(); ++d) {
                x[d] = rng::uniform(seed, rng::Stream::inputs, i, d);
            }
            const auto s = run_circuit(c, w, x);
            for (std::size_t j = 0; j < m; ++j) {
                ys.at(i, j) = expectation(s, obs[j]);
            }
        }
        EXPECT_LE(covariance_report(ys).numerical_rank, primary.numerical_rank);
    }
}

TEST(PrimaryCovariance, NeedsTwoSamples) {
    const auto rc = build_reuploading(1, 1);
    const std::vector<double> w(rc.num_weights(), 0.5);
    EXPECT_THROW((void)primary_covariance(rc.circuit(), w, 1, 0), ValidationError);
}

TEST(Fourier, Cosine) {
    const auto spec = fourier_coefficients([](std::span<const double> x) { return std::cos(x[0]); }, 1, 3, 16);
    for (int k = -3; k <= 3; ++k) {
        const std::vector<int> kv{k};
        const double expected = std::abs(k) == 1 ? 0.5 : 0.0;
        EXPECT_NEAR(std::abs(spec.at(kv) - std::complex<double>(expected, 0.0)), 0.0, 1e-10) << "k=" << k;
    }
}

TEST(Fourier, ProductOfTrigPolynomials) {
    // sin(x) cos(2y): c_{(+-1, +-2)} = -+ i/4 with the sign of k1
    const auto spec = fourier_coefficients(
        [](std::span<const double> x) { return std::sin(x[0]) * std::cos(2 * x[1]); }, 2, 2, 12);
    for (int k2 : {-2, 2}) {
        EXPECT_NEAR(std::abs(spec.at(std::vector<int>{1, k2}) - std::complex<double>(0, -0.25)), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(spec.at(std::vector<int>{-1, k2}) - std::complex<double>(0, 0.25)), 0.0, 1e-12);
    }
    EXPECT_NEAR(std::abs(spec.at(std::vector<int>{0, 0})), 0.0, 1e-12);
}

TEST(Fourier, SingleEncodingLayerHasUnitBandwidth) {
    Rng rng(9);
    for (int t = 0; t < 10; ++t) {
        const auto rc = build_reuploading(1, 1);
        const auto spec = fourier_coefficients(model_function(rc, integer_spectrum_weights(rng, rc)), 1, 4, 20);
        EXPECT_LE(spec.max_abs_beyond(1), 1e-9);
    }
}

TEST(Fourier, ResynthesisReproducesModel) {
    Rng rng(10);
    const auto rc = build_reuploading(2, 2);
    const auto f = model_function(rc, integer_spectrum_weights(rng, rc));
    const auto spec = fourier_coefficients(f, 2, 2, 12);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const auto x = testing::random_vector(rng, 2, 0, 2 * std::numbers::pi);
        worst = std::max(worst, std::abs(spec.resynthesize(x) - f(x)));
    }
    EXPECT_LE(worst, 1e-8);
}

TEST(Fourier, NullityBeyondLayerCount) {
    Rng rng(11);
    for (int dims = 1; dims <= 2; ++dims) {
        for (int layers = 1; layers <= 3; ++layers) {
            const auto rc = build_reuploading(dims, layers);
            const int k = layers + 1;
            const auto spec =
                fourier_coefficients(model_function(rc, integer_spectrum_weights(rng, rc)), dims, k, 4 * k + 4);
            EXPECT_LE(spec.max_abs_beyond(layers), 1e-9) << "M=" << dims << " L=" << layers;
        }
    }
}

TEST(Fourier, ConjugateSymmetry) {
    Rng rng(12);
    for (int t = 0; t < 5; ++t) {
        const auto rc = build_reuploading(2, 2);
        const auto spec = fourier_coefficients(model_function(rc, integer_spectrum_weights(rng, rc)), 2, 3, 16);
        EXPECT_LE(spec.conjugate_symmetry_defect(), 1e-9);
    }
}

TEST(Fourier, AliasingPreconditionEnforced) {
    const auto f = [](std::span<const double>) { return 1.0; };
    EXPECT_THROW((void)fourier_coefficients(f, 1, 3, 15), ValidationError);
    EXPECT_NO_THROW((void)fourier_coefficients(f, 1, 3, 16));
}

TEST(Fourier, FrequencyIndexRoundTrip) {
    FourierSpectrum s;
    s.dims = 3;
    s.cutoff = 2;
    s.coefficients.resize(125);
    for (std::size_t f = 0; f < s.coefficients.size(); ++f) {
        EXPECT_EQ(s.index(s.frequency(f)), f);
    }
    EXPECT_THROW((void)s.index(std::vector<int>{0, 3, 0}), ValidationError);
}

SpectralSummary unit_spectrum() { return spectral_summary(Observable::local(1, 0, 'Z')); }

TEST(Feasibility, SingleQubitCannotCarryFourOutputs) {
    const auto r = check_feasibility(1, 4, 0.1, {unit_spectrum()});
    EXPECT_FALSE(r.check("dimension").passed);
    EXPECT_EQ(r.check("dimension").bound, 3.0);
    EXPECT_FALSE(r.feasible());
}

TEST(Feasibility, PauliZCoversTheRange) {
    const auto r = check_feasibility(1, 1, 0.05, {unit_spectrum()});
    EXPECT_TRUE(r.check("spectral_range").passed);
    EXPECT_TRUE(r.check("dimension").passed);
}

TEST(Feasibility, ShrunkSpectrumFailsRange) {
    SpectralSummary s{-0.5, 0.5, 0.5, 0.25};
    EXPECT_FALSE(check_feasibility(3, 2, 0.1, {s}).check("spectral_range").passed);
}

TEST(Feasibility, EpsilonOutsideUnitIntervalRejected) {
    EXPECT_THROW((void)check_feasibility(1, 1, 0.0, {unit_spectrum()}), ValidationError);
    EXPECT_THROW((void)check_feasibility(1, 1, 1.0, {unit_spectrum()}), ValidationError);
    EXPECT_THROW((void)check_feasibility(1, 1, -0.2, {unit_spectrum()}), ValidationError);
}

TEST(Feasibility, RequirementMatchesClosedForm) {
    const auto r = check_feasibility(4, 100, 0.1, {unit_spectrum()});
    double best = 0.0;
    for (int i = 51; i <= 99; ++i) {
        const double q = i / 100.0;
        const double h = -q * std::log2(q) - (1 - q) * std::log2(1 - q);
        best = std::max(best, (1 - h) / std::log(1 / q));
    }
    EXPECT_NEAR(r.n_min, best * 0.81 * 100, 1e-9);
    EXPECT_EQ(r.gamma, 0.9);
    EXPECT_EQ(r.check("holevo_chernoff").passed, 4.0 >= r.n_min);
}

TEST(Feasibility, RequirementLinearInOutputs) {
    const double n100 = check_feasibility(10, 100, 0.1, {unit_spectrum()}).n_min;
    const double n200 = check_feasibility(10, 200, 0.1, {unit_spectrum()}).n_min;
    EXPECT_GT(n100, 0.0);
    EXPECT_NEAR(n200, 2 * n100, 1e-9 * n100);
}

TEST(Feasibility, MonotoneInOutputsAndSpectrum) {
    double prev = 0.0;
    for (int m = 1; m <= 50; ++m) {
        const double cur = check_feasibility(4, m, 0.2, {unit_spectrum()}).n_min;
        EXPECT_GT(cur, prev);
        prev = cur;
    }
    const auto small = check_feasibility(4, 10, 0.2, {SpectralSummary{-0.5, 0.5, 0.5, 0.25}}).n_min;
    const auto big = check_feasibility(4, 10, 0.2, {SpectralSummary{-2, 2, 2, 4}}).n_min;
    EXPECT_GT(small, big);
}

TEST(Feasibility, NonPositiveLambdaIsUnreachable) {
    const auto r = check_feasibility(4, 2, 0.1, {SpectralSummary{0.0, 1.0, 1.0, 0.0}});
    EXPECT_TRUE(std::isinf(r.n_min));
    EXPECT_FALSE(r.check("holevo_chernoff").passed);
}

TEST(Feasibility, PerObservableSpectraUseTheWorst) {
    const SpectralSummary weak{-0.5, 1.0, 1.0, 0.5};
    const auto both = check_feasibility(4, 2, 0.1, {unit_spectrum(), weak});
    const auto weak_only = check_feasibility(4, 2, 0.1, {weak});
    EXPECT_EQ(both.n_min, weak_only.n_min);
    ASSERT_EQ(both.observables.size(), 2U);
    EXPECT_THROW((void)check_feasibility(4, 3, 0.1, {weak, weak}), ValidationError);
}

TEST(Feasibility, VerdictIsConjunction) {
    Rng rng(13);
    for (int t = 0; t < 100; ++t) {
        const int n = testing::uniform_int(rng, 1, 6);
        const int m = testing::uniform_int(rng, 1, 100);
        const double lo = -testing::uniform(rng, 0.1, 2.0), hi = testing::uniform(rng, 0.1, 2.0);
        const auto r = check_feasibility(n, m, testing::uniform(rng, 0.01, 0.99),
                                         {SpectralSummary{lo, hi, std::max(-lo, hi), -lo * hi}});
        ASSERT_EQ(r.checks.size(), 3U);
        bool all = true;
        for (const auto &c : r.checks) {
            all = all && c.passed;
        }
        EXPECT_EQ(r.feasible(), all);
    }
}

TEST(Feasibility, CoefficientFinitePositiveAndLargestAtGridEnd) {
    const auto grid = default_q_grid();
    ASSERT_EQ(grid.size(), 49U);
    double prev = 0.0;
    for (double q : grid) {
        const double c = holevo_chernoff_coefficient(q);
        EXPECT_TRUE(std::isfinite(c));
        EXPECT_GT(c, prev) << "q=" << q;
        prev = c;
    }
    EXPECT_EQ(check_feasibility(1, 1, 0.1, {unit_spectrum()}).q_star, grid.back());
    EXPECT_THROW((void)holevo_chernoff_coefficient(0.5), ValidationError);
    EXPECT_THROW((void)holevo_chernoff_coefficient(1.0), ValidationError);
}

TEST(Feasibility, BinaryEntropy) {
    EXPECT_EQ(binary_entropy(0.5), 1.0);
    EXPECT_EQ(binary_entropy(0.0), 0.0);
    EXPECT_NEAR(binary_entropy(0.11), binary_entropy(0.89), 1e-15);
}

} // namespace
} // namespace evs
