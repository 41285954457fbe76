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

#include <numbers>

#include "evs/reuploading.hpp"
#include "test_util.hpp"

namespace evs {
namespace {

using testing::Rng;
constexpr double kPi = std::numbers::pi;

const Observable kZ = Observable::local(1, 0, 'Z');

TEST(BuildReuploading, OneInputOneLayer) {
    const auto rc = build_reuploading(1, 1);
    EXPECT_EQ(rc.circuit().size(), 3U);
    EXPECT_EQ(rc.num_weights(), 3U);
}

TEST(BuildReuploading, TwoInputsThreeLayers) {
    const auto rc = build_reuploading(2, 3);
    EXPECT_EQ(rc.circuit().size(), 12U);
    EXPECT_EQ(rc.num_weights(), 12U);
    EXPECT_EQ(rc.circuit().num_weights(), 12U);
}

TEST(BuildReuploading, RejectsNonpositiveSizes) {
    EXPECT_THROW(build_reuploading(0, 1), ValidationError);
    EXPECT_THROW(build_reuploading(1, 0), ValidationError);
    EXPECT_THROW(build_reuploading(-2, 3), ValidationError);
}

TEST(BuildReuploading, LayerStructure) {
    for (int m = 1; m <= 4; ++m) {
        for (int l = 1; l <= 4; ++l) {
            const auto rc = build_reuploading(m, l);
            ASSERT_EQ(rc.circuit().size(), static_cast<std::size_t>((m + 2) * l));
            int data_gates = 0, ry = 0;
            for (const auto &g : rc.circuit().gates()) {
                data_gates += g.binding.kind == BindingKind::data_product;
                ry += g.kind == GateKind::RY;
            }
            EXPECT_EQ(data_gates, m * l);
            EXPECT_EQ(ry, l);
        }
    }
}

TEST(EvaluateModel, ZeroWeightsGiveConstantOne) {
    const auto rc = build_reuploading(2, 3);
    const std::vector<double> w(rc.num_weights(), 0.0);
    for (double a : {0.0, 0.3, 1.0}) {
        const std::vector<double> x{a, 1.0 - a};
        EXPECT_NEAR(evaluate_model(rc, w, x, kZ), 1.0, 1e-15);
    }
}

TEST(EvaluateModel, ZRotationsLeaveZeroInvariant) {
    const auto rc = build_reuploading(1, 1);
    const std::vector<double> w{0.0, 2.7, 0.0};
    for (double a : {0.0, 0.25, 0.9}) {
        const std::vector<double> x{a};
        EXPECT_NEAR(evaluate_model(rc, w, x, kZ), 1.0, 1e-15);
    }
}

TEST(EvaluateModel, ZMatchesOneMinusTwiceExcitedPopulation) {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto rc = build_reuploading(2, 3);
        const auto w = testing::random_vector(rng, rc.num_weights(), -kPi, kPi);
        const auto x = testing::random_vector(rng, 2, 0.0, 1.0);
        const auto s = run_circuit(rc.circuit(), w, x);
        EXPECT_NEAR(evaluate_model(rc, w, x, kZ), 1.0 - 2.0 * s.probability(1), 1e-12);
    }
}

TEST(EvaluateModel, FlippedZIsTwiceExcitedPopulationMinusOne) {
    Rng rng(4);
    const auto zprime = amplitude_z_observable();
    for (int trial = 0; trial < 20; ++trial) {
        const auto rc = build_reuploading(1, 2);
        const auto w = testing::random_vector(rng, rc.num_weights(), -kPi, kPi);
        const std::vector<double> x{testing::uniform(rng)};
        const double f = std::abs(run_circuit(rc.circuit(), w, x).amplitude(1));
        EXPECT_NEAR(evaluate_model(rc, w, x, zprime), 2.0 * f * f - 1.0, 1e-12);
    }
}

TEST(EvaluateModel, RejectsDimensionMismatch) {
    const auto rc = build_reuploading(2, 1);
    const std::vector<double> w(4, 0.1);
    EXPECT_THROW(evaluate_model(rc, std::vector<double>(3, 0.1), std::vector<double>{0.1, 0.2}, kZ),
                 ValidationError);
    EXPECT_THROW(evaluate_model(rc, w, std::vector<double>{0.1}, kZ), ValidationError);
    EXPECT_THROW(evaluate_model(rc, w, std::vector<double>{0.1, 1.5}, kZ), ValidationError);
}

TEST(EvaluateModel, ValueBoundedByObservableNorm) {
    Rng rng(5);
    const auto obs = Observable::pauli(1, {{0.6, "X"}, {-0.8, "Z"}});
    for (int trial = 0; trial < 50; ++trial) {
        const auto rc = build_reuploading(1, 3);
        const auto w = testing::random_vector(rng, rc.num_weights(), -kPi, kPi);
        const std::vector<double> x{testing::uniform(rng)};
        EXPECT_LE(std::abs(evaluate_model(rc, w, x, obs)), 1.0 + 1e-12);
    }
}

TEST(AmplitudeTransform, Endpoints) {
    EXPECT_EQ(amplitude_target_transform(-1.0), 0.0);
    EXPECT_EQ(amplitude_target_transform(1.0), 1.0);
    EXPECT_NEAR(amplitude_target_transform(0.0), 0.70710678118654752, 1e-15);
}

TEST(AmplitudeTransform, RoundTrip) {
    for (int i = 0; i <= 200; ++i) {
        const double g = -1.0 + i / 100.0;
        const double f = amplitude_target_transform(g);
        EXPECT_NEAR(2.0 * f * f - 1.0, g, 1e-14);
    }
}

TEST(AmplitudeTransform, RejectsOutOfRange) {
    EXPECT_THROW(amplitude_target_transform(1.0 + 1e-9), ValidationError);
    EXPECT_THROW(amplitude_target_transform(-1.5), ValidationError);
    EXPECT_THROW(amplitude_target_transform(std::nan("")), ValidationError);
}

GridFunction constant_target(double c, int points = 16) {
    return tabulate([c](std::span<const double>) { return c; }, 1, points);
}

TEST(FitToFunction, ConstantOneIsFitToMachinePrecision) {
    const auto rc = build_reuploading(1, 1);
    FitConfig cfg;
    cfg.seed = 1;
    const auto r = fit_to_function(rc, constant_target(1.0), kZ, cfg);
    EXPECT_LE(r.final_loss, 1e-10);
}

TEST(FitToFunction, ConstantZeroWithOneLayer) {
    const auto rc = build_reuploading(1, 1);
    FitConfig cfg;
    cfg.seed = 2;
    const auto r = fit_to_function(rc, constant_target(0.0), kZ, cfg);
    EXPECT_LE(r.final_loss, 1e-8);
}

TEST(FitToFunction, StepTargetLossDecreasesWithLayers) {
    const auto step = tabulate([](std::span<const double> x) { return x[0] < 0.5 ? -1.0 : 1.0; }, 1, 64);
    FitConfig cfg;
    cfg.seed = 3;
    double prev = std::numeric_limits<double>::infinity();
    for (int layers : {2, 4, 8}) {
        const auto r = fit_to_function(build_reuploading(1, layers), step, kZ, cfg);
        EXPECT_LT(r.final_loss, prev) << "L=" << layers;
        prev = r.final_loss;
    }
}

TEST(FitToFunction, HistoryIsConsistent) {
    const auto target = tabulate([](std::span<const double> x) { return std::sin(6.0 * x[0]); }, 1, 32);
    FitConfig cfg;
    cfg.seed = 4;
    cfg.max_iters = 300;
    const auto r = fit_to_function(build_reuploading(1, 3), target, kZ, cfg);
    ASSERT_FALSE(r.loss_history.empty());
    EXPECT_EQ(r.final_loss, r.loss_history.back());
    EXPECT_LE(r.final_loss, r.loss_history.front());
    for (std::size_t i = 1; i < r.loss_history.size(); ++i) {
        EXPECT_LE(r.loss_history[i], r.loss_history[i - 1]);
    }
    EXPECT_NEAR(fit_loss(build_reuploading(1, 3), r.weights, target, kZ), r.final_loss, 1e-12);
}

TEST(FitToFunction, DeterministicGivenSeed) {
    const auto target = tabulate([](std::span<const double> x) { return x[0] * x[0] - 0.5; }, 1, 16);
    FitConfig cfg;
    cfg.seed = 9;
    cfg.max_iters = 200;
    const auto rc = build_reuploading(1, 2);
    const auto a = fit_to_function(rc, target, kZ, cfg);
    const auto b = fit_to_function(rc, target, kZ, cfg);
    EXPECT_EQ(a.weights, b.weights);
    EXPECT_EQ(a.loss_history, b.loss_history);
}

TEST(FitToFunction, RejectsTargetOutsideUnitInterval) {
    const auto rc = build_reuploading(1, 1);
    EXPECT_THROW(fit_to_function(rc, constant_target(1.5), kZ, FitConfig{}), ValidationError);
}

TEST(FitToFunction, RejectsBadConfig) {
    const auto rc = build_reuploading(1, 1);
    FitConfig cfg;
    cfg.step_size = 0.0;
    EXPECT_THROW(fit_to_function(rc, constant_target(0.0), kZ, cfg), ValidationError);
    cfg = FitConfig{};
    cfg.grid_points_per_dim = 1;
    EXPECT_THROW(cfg.validate(), ValidationError);
}

TEST(FitToFunction, TwoDimensionalTarget) {
    const auto target = tabulate([](std::span<const double> x) { return 0.5 * (x[0] - x[1]); }, 2, 8);
    FitConfig cfg;
    cfg.seed = 6;
    cfg.max_iters = 800;
    const auto r = fit_to_function(build_reuploading(2, 3), target, kZ, cfg);
    EXPECT_LE(r.final_loss, 1e-3);
}

// --- properties -------------------------------------------------------------

TEST(ReuploadingProperty, FiniteDifferenceMatchesParameterShift) {
    Rng rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        const int m = testing::uniform_int(rng, 1, 3);
        const auto rc = build_reuploading(m, testing::uniform_int(rng, 1, 4));
        const auto w = testing::random_vector(rng, rc.num_weights(), -kPi, kPi);
        const auto x = testing::random_vector(rng, static_cast<std::size_t>(m), 0.0, 1.0);
        const auto fd = model_gradient(rc.circuit(), w, x, kZ, GradientMode::finite_difference, 1e-5);
        const auto ps = model_gradient(rc.circuit(), w, x, kZ, GradientMode::parameter_shift);
        ASSERT_EQ(fd.size(), ps.size());
        for (std::size_t j = 0; j < fd.size(); ++j) {
            EXPECT_NEAR(fd[j], ps[j], 1e-6) << "trial " << trial << " weight " << j;
        }
    }
}

TEST(ReuploadingProperty, FitterGradientMatchesReference) {
    // Loss gradient from the cached path against 2/N sum (f - g) df/dw.
    Rng rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        const auto rc = build_reuploading(1, 3);
        const auto target = tabulate([](std::span<const double> x) { return std::cos(4.0 * x[0]); }, 1, 9);
        const auto w = testing::random_vector(rng, rc.num_weights(), -kPi, kPi);
        for (auto mode : {GradientMode::finite_difference, GradientMode::parameter_shift}) {
            const detail::SingleQubitLoss loss(rc.circuit(), kZ, target, mode, 1e-5);
            std::vector<double> grad;
            loss(w, &grad);
            std::vector<double> ref(w.size(), 0.0);
            for (std::size_t i = 0; i < target.size(); ++i) {
                const auto x = target.node(i);
                const double r = evaluate_model(rc, w, x, kZ) - target.values[i];
                const auto g = model_gradient(rc.circuit(), w, x, kZ, GradientMode::parameter_shift);
                for (std::size_t j = 0; j < w.size(); ++j) {
                    ref[j] += 2.0 * r * g[j] / static_cast<double>(target.size());
                }
            }
            for (std::size_t j = 0; j < w.size(); ++j) {
                EXPECT_NEAR(grad[j], ref[j], 1e-6);
            }
        }
    }
}

TEST(ReuploadingProperty, BestOfRestartsIsNonincreasing) {
    const auto target = tabulate([](std::span<const double> x) { return x[0] < 0.3 ? 0.8 : -0.4; }, 1, 32);
    FitConfig cfg;
    cfg.seed = 10;
    cfg.max_iters = 150;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 5; ++k) {
        cfg.restarts = k;
        const auto r = fit_to_function(build_reuploading(1, 2), target, kZ, cfg);
        EXPECT_LE(r.final_loss, prev);
        prev = r.final_loss;
        ASSERT_EQ(r.restart_losses.size(), static_cast<std::size_t>(k));
    }
}

TEST(ReuploadingProperty, FitNeverWorseThanInitialLoss) {
    Rng rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const double a = testing::uniform(rng, -1.0, 1.0), b = testing::uniform(rng, 1.0, 8.0);
        const auto target = tabulate([a, b](std::span<const double> x) { return a * std::sin(b * x[0]); }, 1, 16);
        FitConfig cfg;
        cfg.seed = static_cast<std::uint64_t>(trial);
        cfg.max_iters = 100;
        cfg.restarts = 1;
        const auto r = fit_to_function(build_reuploading(1, 2), target, kZ, cfg);
        EXPECT_LE(r.final_loss, r.loss_history.front());
    }
}

} // namespace
} // namespace evs
