// Copyright 2025 The mfit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <variant>

#include "mfit/errors.hpp"
#include "mfit/manifold.hpp"
#include "mfit/noise_pca.hpp"
#include "mfit/oracles.hpp"

namespace mfit {
namespace {

constexpr double kSigma = 0.1;
constexpr double kOptEps = 0.02;

ExactSupportSource circle_source() {
  const auto m = AnalyticManifold::circle(1.0);
  return ExactSupportSource(m, make_params(m.bounds(), kSigma, kOptEps / 4.0));
}

OracleBudget large_budget() { return OracleBudget(0, 1'000'000, 0.1); }

Vec unit(double angle) {
  Vec b(2);
  b << std::cos(angle), std::sin(angle);
  return b;
}

TEST(ExactSource, EstimateWithinAccuracy) {
  auto src = circle_source();
  for (double a : {0.0, 0.9, 2.2, 4.0}) {
    const SupportEstimate e = src.estimate(unit(a), 0);
    ASSERT_FALSE(e.failed);
    EXPECT_NEAR(e.s_est, 1.0, kOptEps / 4.0);
  }
}

TEST(ExactSource, FrameAndOffsetShiftSupport) {
  const auto m = AnalyticManifold::circle(1.0, 3);
  Mat frame = Mat::Identity(3, 2);
  Vec offset(3);
  offset << 0.5, 0.0, 0.0;
  ExactSupportSource src(m, make_params(m.bounds(), kSigma, kOptEps / 4.0), frame, offset);
  EXPECT_EQ(src.dim(), 2);
  EXPECT_NEAR(src.estimate(Vec::Unit(2, 0), 0).s_est, 0.5, kOptEps / 4.0);
}

TEST(WeakValidity, ValidAboveSupport) {
  auto src = circle_source();
  auto budget = large_budget();
  EXPECT_TRUE(std::holds_alternative<Valid>(weak_validity(unit(0.0), 1.2, kOptEps, src, budget)));
}

TEST(WeakValidity, AlmostViolatedBelowSupport) {
  auto src = circle_source();
  auto budget = large_budget();
  const WeakAnswer a = weak_validity(unit(0.0), 0.8, kOptEps, src, budget);
  ASSERT_TRUE(std::holds_alternative<AlmostViolated>(a));
  EXPECT_NEAR(std::get<AlmostViolated>(a).level, 1.0, kOptEps / 4.0);
}

TEST(WeakValidity, ConsumesOneBatch) {
  auto src = circle_source();
  auto budget = large_budget();
  weak_validity(unit(1.0), 1.0, kOptEps, src, budget);
  EXPECT_EQ(budget.used(), 1);
}

TEST(WeakSeparation, OriginIsInBody) {
  auto src = circle_source();
  auto budget = large_budget();
  EXPECT_TRUE(std::holds_alternative<InBody>(weak_separation(Vec::Zero(2), kOptEps, src, budget)));
}

// The unit-ball premise caps |y| at 1 + delta, so the far-point case uses a
// half-size circle: y = (1, 0) sits at twice its radius.
TEST(WeakSeparation, FarPointIsSeparated) {
  const auto m = AnalyticManifold::circle(0.5);
  ExactSupportSource src(m, make_params(m.bounds(), kSigma, kOptEps / 4.0));
  auto budget = large_budget();
  const double delta = kOptEps;
  const Vec y = Vec::Unit(2, 0);
  const WeakAnswer a = weak_separation(y, delta, src, budget);
  ASSERT_TRUE(std::holds_alternative<SeparatingHyperplane>(a));
  const auto& h = std::get<SeparatingHyperplane>(a);
  EXPECT_NEAR(h.b.lpNorm<Eigen::Infinity>(), 1.0, 1e-12);
  EXPECT_GT(h.b.normalized()(0), 0.9);
  EXPECT_NEAR(h.offset, h.b.dot(y), 1e-12);
  // Uniform points of the shrunken disc S(K, -delta) stay below the plane.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int violations = 0;
  for (int k = 0; k < 1000; ++k) {
    const double rad = (0.5 - delta) * std::sqrt(u(rng));
    const Vec x = rad * unit(2 * std::numbers::pi * u(rng));
    violations += h.b.dot(x) > h.offset + delta ? 1 : 0;
  }
  EXPECT_EQ(violations, 0);
}

TEST(WeakSeparation, OutsideUnitBallThrows) {
  auto src = circle_source();
  auto budget = large_budget();
  Vec y(2);
  y << 2.0, 0.0;
  EXPECT_THROW(weak_separation(y, kOptEps, src, budget), ContractError);
}

TEST(WeakValidity, ThresholdAtEstimateNeverFails) {
  auto src = circle_source();
  auto budget = large_budget();
  const double s = src.estimate(unit(0.7), 0).s_est;
  const WeakAnswer a = weak_validity(unit(0.7), s, kOptEps, src, budget);
  EXPECT_FALSE(std::holds_alternative<Failed>(a));
}

TEST(OptimizationCap, Formula) {
  // ceil(10 * 4 * ln(200)) = 212.
  EXPECT_EQ(optimization_cap(2, 0.02), 212);
  EXPECT_EQ(optimization_cap(2, 0.02, 20.0), 424);
  EXPECT_EQ(optimization_cap(3, 0.02), 477);
}

TEST(WeakOptimization, ReturnsNearOptimalPointInBody) {
  auto src = circle_source();
  auto budget = large_budget();
  for (double angle : {0.3, 1.7, 3.9}) {
    OptimizationStats stats;
    const Vec b = unit(angle);
    const WeakAnswer a = weak_optimization(b, kOptEps, src, budget, &stats);
    ASSERT_TRUE(std::holds_alternative<OptPoint>(a)) << angle;
    const Vec& y = std::get<OptPoint>(a).y;
    EXPECT_GE(b.dot(y), 1.0 - kOptEps);
    EXPECT_LE(y.norm(), 1.0 + kOptEps);
    EXPECT_LE(stats.iterations, optimization_cap(2, kOptEps));
    EXPECT_NEAR(stats.level, 1.0, kOptEps);
  }
}

TEST(WeakOptimization, OppositeDirectionsGiveWidth) {
  auto src = circle_source();
  auto budget = large_budget();
  const Vec b = unit(1.1);
  const Vec yp = std::get<OptPoint>(weak_optimization(b, kOptEps, src, budget)).y;
  const Vec ym = std::get<OptPoint>(weak_optimization(-b, kOptEps, src, budget)).y;
  EXPECT_NEAR(b.dot(yp) - b.dot(ym), 2.0, 2 * kOptEps);
}

TEST(WeakOptimization, NeverExceedsSupportByMoreThanEps) {
  auto src = circle_source();
  auto budget = large_budget();
  for (int k = 0; k < 12; ++k) {
    const Vec b = unit(0.5 * k);
    const Vec y = std::get<OptPoint>(weak_optimization(b, kOptEps, src, budget)).y;
    EXPECT_LE(b.dot(y), 1.0 + kOptEps);
  }
}

TEST(WeakOptimization, CallCountGrowsWithDimensionAndPrecision) {
  EXPECT_LT(optimization_cap(2, 0.05), optimization_cap(3, 0.05));
  EXPECT_LT(optimization_cap(2, 0.05), optimization_cap(2, 0.01));
}

TEST(WeakOptimization, ExhaustedBudgetThrows) {
  auto src = circle_source();
  OracleBudget budget(0, 3, 0.1);
  EXPECT_THROW(weak_optimization(unit(0.5), kOptEps, src, budget), ContractError);
}

TEST(OracleBudget, HandsOutDisjointIndices) {
  OracleBudget budget(100, 3, 0.3);
  EXPECT_EQ(budget.next(), 0);
  EXPECT_EQ(budget.next(), 1);
  EXPECT_EQ(budget.next(), 2);
  EXPECT_THROW(budget.next(), ContractError);
  EXPECT_NEAR(budget.eta_per_call(), 0.1, 1e-15);
}

TEST(BatchSource, UsesDisjointBlocks) {
  const auto m = AnalyticManifold::circle(1.0);
  const long long per = 1000;
  const auto data = generate_observations(m, 3 * per, kSigma, 4);
  auto pts = std::make_shared<Mat>(2, 3 * per);
  for (long long i = 0; i < 3 * per; ++i) pts->col(i) = data.observed[i];
  const auto params = make_params(m.bounds(), kSigma, kOptEps / 4.0);
  BatchSupportSource src(pts, per, params);
  EXPECT_EQ(src.batch_count(), 3);
  const SupportEstimate first = src.estimate(unit(0.0), 0);
  const SupportEstimate again = src.estimate(unit(0.0), 0);
  EXPECT_EQ(first.j_star, again.j_star);
  EXPECT_EQ(first.samples_used, per);
  EXPECT_THROW(src.estimate(unit(0.0), 3), ContractError);
}

TEST(GenerativeSource, DeterministicPerBatch) {
  const auto m = AnalyticManifold::circle(1.0);
  const auto params = make_params(m.bounds(), kSigma, kOptEps / 4.0);
  GenerativeSupportSource a(m, kSigma, 2000, params, 9);
  GenerativeSupportSource b(m, kSigma, 2000, params, 9);
  EXPECT_EQ(a.estimate(unit(0.4), 5).j_star, b.estimate(unit(0.4), 5).j_star);
}

}  // namespace
}  // namespace mfit
