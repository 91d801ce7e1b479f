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
#include <numbers>
#include <random>

#include "mfit/errors.hpp"
#include "mfit/manifold.hpp"
#include "mfit/net.hpp"
#include "mfit/oracles.hpp"

namespace mfit {
namespace {

constexpr double kSigma = 0.1;
constexpr double kOptEps = 0.02;

GeometricBounds unit_circle_bounds() {
  GeometricBounds b;
  b.d = 1;
  b.n = 2;
  b.tau = 1.0;
  b.R = 1.0;
  b.Lambda = 1.0;
  b.V = 2 * std::numbers::pi;
  return b;
}

NetConstants capped() {
  NetConstants c;
  c.sphere_net_cap = 32;
  c.n0_cap = 60;
  return c;
}

TEST(NetParams, RadiiWhenReachEqualsExposure) {
  const NetParams p = net_params(unit_circle_bounds(), 0.01, 2);
  EXPECT_DOUBLE_EQ(p.r1, 0.5);
  EXPECT_DOUBLE_EQ(p.r0, 0.25);
}

// mpmath reference for d = 1, tau = R = Lambda = 1, D = 2, eps = 0.01.
TEST(NetParams, FrozenCircleValues) {
  const NetParams p = net_params(unit_circle_bounds(), 0.01, 2);
  EXPECT_DOUBLE_EQ(p.L, 8.0);
  EXPECT_NEAR(p.delta, 0.0427493986669174247, 1e-15);
  EXPECT_DOUBLE_EQ(p.eps_prime, 0.015625);
  EXPECT_NEAR(p.accept_radius, 2.73596151468271518, 1e-13);
  EXPECT_EQ(p.script_N_estimate, 402.0);
  EXPECT_EQ(p.script_N, 402);
  // ceil(4^3 * (2 pi / 2) / 0.01).
  EXPECT_EQ(p.N0_formula, 20107.0);
}

TEST(NetParams, CapsApply) {
  const NetParams p = net_params(unit_circle_bounds(), 0.01, 2, capped());
  EXPECT_EQ(p.script_N, 32);
  EXPECT_EQ(p.N0, 60);
  EXPECT_EQ(p.N0_formula, 20107.0);
}

TEST(NetParams, RejectsLargeEps) {
  EXPECT_THROW(net_params(unit_circle_bounds(), 1.5, 2), ContractError);
  EXPECT_THROW(net_params(unit_circle_bounds(), 0.01, 1), ContractError);
}

TEST(SphereNet, CircleCardinalityAndRadius) {
  const NetParams p = net_params(unit_circle_bounds(), 0.01, 2);
  const Vec v = Vec::Unit(2, 0);
  const auto net = sphere_net(v, p.delta, p.eps_prime, 2);
  EXPECT_NEAR(static_cast<double>(net.size()), std::ceil(2 * std::numbers::pi / p.eps_prime), 1.0);
  EXPECT_NEAR((net.front() - v).norm(), 0.0, 1e-12);
  for (const Vec& u : net) EXPECT_NEAR((u - (1 - p.delta) * v).norm(), p.delta, 1e-10);
}

TEST(SphereNet, CoversSphereInThreeDimensions) {
  const double delta = 0.05, eps_prime = 0.3;
  Vec v(3);
  v << 0.0, 0.6, 0.8;
  const auto net = sphere_net(v, delta, eps_prime, 3);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (const Vec& u : net) EXPECT_NEAR((u - (1 - delta) * v).norm(), delta, 1e-10);
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    Vec z(3);
    z << g(rng), g(rng), g(rng);
    const Vec x = (1 - delta) * v + delta * z.normalized();
    double best = 1e300;
    for (const Vec& u : net) best = std::min(best, (x - u).norm());
    worst = std::max(worst, best);
  }
  EXPECT_LE(worst, eps_prime * delta);
}

TEST(SphereNet, CapWidensSpacing) {
  const auto net = sphere_net(Vec::Unit(2, 0), 0.04, 0.015625, 2, 32);
  EXPECT_LE(static_cast<long long>(net.size()), 32);
  EXPECT_GE(static_cast<long long>(net.size()), 16);
}

TEST(BallTester, DeepDirectionOnCircleAccepts) {
  const auto m = AnalyticManifold::circle(1.0);
  const NetParams p = net_params(m.bounds(), 0.01, 2, capped());
  ExactSupportSource src(m, make_params(m.bounds(), kSigma, kOptEps / 4.0));
  OracleBudget budget(0, 1'000'000, 0.1);
  const BallTestResult r = ball_tester(Vec::Unit(2, 0), p, src, budget, {.opt_eps = kOptEps});
  ASSERT_EQ(r.status, TesterStatus::Accepted);
  EXPECT_LT((r.y - Vec::Unit(2, 0)).norm(), p.accept_radius);
  EXPECT_LT((r.y - Vec::Unit(2, 0)).norm(), 2 * kOptEps);
  EXPECT_EQ(r.tested, static_cast<int>(p.script_N));
}

TEST(BallTester, EllipseNeverReturnsFarPoint) {
  const auto m = AnalyticManifold::ellipse(1.0, 0.7);
  const NetParams p = net_params(m.bounds(), 0.01, 2, capped());
  ExactSupportSource src(m, make_params(m.bounds(), kSigma, kOptEps / 4.0));
  OracleBudget budget(0, 1'000'000, 0.1);
  for (double angle : {0.0, 0.4, 1.2, 1.5707}) {
    Vec v(2);
    v << std::cos(angle), std::sin(angle);
    const BallTestResult r = ball_tester(v, p, src, budget, {.opt_eps = kOptEps});
    ASSERT_NE(r.status, TesterStatus::Failed) << r.reason;
    if (r.status == TesterStatus::Accepted) {
      EXPECT_LT((r.y - m.support_point(v)).norm(), p.accept_radius) << angle;
    }
  }
}

TEST(BallTester, SingleDirectionNetAlwaysAccepts) {
  // Untested guarantee: with one sphere-net direction there is no spread.
  const auto m = AnalyticManifold::circle(1.0);
  NetParams p = net_params(m.bounds(), 0.01, 2);
  p.sphere_net_cap = 1;
  ExactSupportSource src(m, make_params(m.bounds(), kSigma, kOptEps / 4.0));
  OracleBudget budget(0, 1'000'000, 0.1);
  EXPECT_EQ(ball_tester(Vec::Unit(2, 1), p, src, budget).status, TesterStatus::Accepted);
}

class CircleNet : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    const auto m = AnalyticManifold::circle(1.0);
    params_ = net_params(m.bounds(), 0.01, 2, capped());
    ExactSupportSource src(m, make_params(m.bounds(), kSigma, kOptEps / 4.0));
    OracleBudget budget(0, 1'000'000'000, 0.1);
    net_ = find_points(params_, m.bounds(), src, budget, 11, {.opt_eps = kOptEps});
  }
  static inline NetParams params_;
  static inline ReconstructionNet net_;
};

TEST_F(CircleNet, AcceptedPointsNearManifold) {
  ASSERT_GT(net_.accepted, 0);
  const auto m = AnalyticManifold::circle(1.0);
  for (const Vec& y : net_.points()) EXPECT_LT(m.distance(y), 2 * kOptEps);
}

TEST_F(CircleNet, CoversCircle) {
  const auto m = AnalyticManifold::circle(1.0);
  const auto pts = net_.points();
  // Deep-direction net: 60 uniform directions leave gaps well under 0.5.
  for (const Vec& x : m.uniform_sample(2000, 3)) {
    double best = 1e300;
    for (const Vec& y : pts) best = std::min(best, (x - y).norm());
    EXPECT_LT(best, params_.accept_radius);
    EXPECT_LT(best, 0.5);
  }
}

TEST_F(CircleNet, AcceptanceRateAboveBound) {
  EXPECT_DOUBLE_EQ(net_.acceptance_bound, 0.0625);
  const double n = static_cast<double>(net_.iterations);
  const double mc = std::sqrt(net_.acceptance_bound * (1 - net_.acceptance_bound) / n);
  EXPECT_GE(net_.acceptance_rate, net_.acceptance_bound - 3 * mc);
  EXPECT_EQ(net_.failures, 0);
}

TEST_F(CircleNet, SameSeedSameNet) {
  const auto m = AnalyticManifold::circle(1.0);
  ExactSupportSource src(m, make_params(m.bounds(), kSigma, kOptEps / 4.0));
  OracleBudget budget(0, 1'000'000'000, 0.1);
  const auto again = find_points(params_, m.bounds(), src, budget, 11, {.opt_eps = kOptEps});
  ASSERT_EQ(again.entries.size(), net_.entries.size());
  for (std::size_t i = 0; i < again.entries.size(); ++i) {
    EXPECT_EQ(again.entries[i].accepted, net_.entries[i].accepted);
    if (again.entries[i].accepted) EXPECT_EQ(again.entries[i].point, net_.entries[i].point);
  }
}

TEST(FiberStability, CircleBasePointFollowsAngle) {
  const auto m = AnalyticManifold::circle(1.0);
  for (double theta : {0.0, 0.01, 0.03}) {
    Vec v(2), w(2);
    v << 1.0, 0.0;
    w << std::cos(theta), std::sin(theta);
    EXPECT_NEAR((m.support_point(v) - m.support_point(w)).norm(), 2 * std::sin(theta / 2), 1e-12);
  }
}

TEST(FiberStability, BoundsHoldOnCircleAndEllipse) {
  for (const auto& m : {AnalyticManifold::circle(1.0), AnalyticManifold::ellipse(1.0, 0.7)}) {
    const NetParams p = net_params(m.bounds(), 0.01, 2);
    const FiberStabilityReport r = fiber_stability_check(m, 50, p, 23, 10000);
    EXPECT_EQ(r.pairs, 50);
    EXPECT_LE(r.max_displacement_ratio, 1.0);
    EXPECT_EQ(r.containment_violations, 0);
  }
}

TEST(FiberStability, RejectsNonHypersurface) {
  const auto m = AnalyticManifold::circle(1.0, 3);
  EXPECT_THROW(fiber_stability_check(m, 5, net_params(m.bounds(), 0.01, 3)), ContractError);
}

}  // namespace
}  // namespace mfit
