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
#include "mfit/geometry.hpp"
#include "mfit/manifold.hpp"

namespace mfit {
namespace {

TEST(UniformSample, CircleQuarterArcs) {
  const auto m = AnalyticManifold::circle(1.0);
  const auto pts = m.uniform_sample(40000, 11);
  int counts[4] = {0, 0, 0, 0};
  for (const Vec& p : pts) {
    const double t = std::atan2(p(1), p(0)) + std::numbers::pi;
    ++counts[std::min(3, static_cast<int>(t / (std::numbers::pi / 2)))];
  }
  for (int c : counts) EXPECT_NEAR(c / 40000.0, 0.25, 0.007);
}

TEST(UniformSample, SphereMeanNearZero) {
  const auto pts = AnalyticManifold::sphere(1.0).uniform_sample(10000, 12);
  Vec mean = Vec::Zero(3);
  for (const Vec& p : pts) mean += p;
  EXPECT_LE((mean / 10000.0).norm(), 0.04);
}

TEST(UniformSample, SinglePointOnManifold) {
  for (const auto& m : {AnalyticManifold::ellipse(1.0, 0.5), AnalyticManifold::torus(0.6, 0.2)}) {
    const auto pts = m.uniform_sample(1, 13);
    ASSERT_EQ(pts.size(), 1u);
    EXPECT_LT(m.distance(pts[0]), 1e-10);
  }
}

TEST(UniformSample, SameSeedSamePoints) {
  const auto m = AnalyticManifold::torus(0.6, 0.2);
  const auto a = m.uniform_sample(50, 99);
  const auto b = m.uniform_sample(50, 99);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(SupportExact, CircleIsRadius) {
  const auto m = AnalyticManifold::circle(0.7);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int k = 0; k < 20; ++k) {
    Vec b(2);
    b << g(rng), g(rng);
    EXPECT_NEAR(m.support(b.normalized()), 0.7, 1e-12);
  }
}

TEST(SupportExact, ShiftedSphere) {
  Vec c(3);
  c << 0.1, -0.2, 0.05;
  const auto m = AnalyticManifold::sphere(0.5, 2, 3, c);
  Vec b(3);
  b << 1.0, 2.0, -0.5;
  b.normalize();
  EXPECT_NEAR(m.support(b), 0.5 + b.dot(c), 1e-12);
}

TEST(SupportExact, TorusTop) {
  const auto m = AnalyticManifold::torus(0.6, 0.2);
  EXPECT_NEAR(m.support(Vec::Unit(3, 2)), 0.2, 1e-6);
}

TEST(SupportExact, ZeroDirectionThrows) {
  EXPECT_THROW(AnalyticManifold::circle(1.0).support(Vec::Zero(2)), ContractError);
}

TEST(OmegaD, SmallDimensions) {
  EXPECT_NEAR(omega_d(1), 2.0, 1e-15);
  EXPECT_NEAR(omega_d(2), std::numbers::pi, 1e-15);
  EXPECT_NEAR(omega_d(3), 4.0 * std::numbers::pi / 3.0, 1e-14);
  EXPECT_THROW(omega_d(-1), ContractError);
}

TEST(BetaAndD, UnitCircleHalfAlpha) {
  GeometricBounds b;
  b.d = 1;
  b.n = 10;
  b.tau = 1.0;
  b.V = 2 * std::numbers::pi;
  const BetaResult r = beta_and_D(0.5, b);
  // mpmath: sqrt(0.1 * 0.125^2 * 0.0625 * (2 / 2 pi)).
  EXPECT_NEAR(r.beta, 0.00557538786297740973, 1e-15);
  EXPECT_EQ(r.D, 564);
  EXPECT_NEAR(r.eps_max, 0.5 * r.beta * r.beta, 1e-20);
}

TEST(BetaAndD, VolumeOfOneBallGivesTwo) {
  GeometricBounds b;
  b.d = 1;
  b.tau = 1.0;
  // V = omega_1 beta(V) solves V^3 = k omega_1^3 with k the product of the
  // alpha-dependent factors; nudging V up puts V / (omega_1 beta) just above 1.
  const double k = 0.1 * 0.125 * 0.125 * 0.0625;
  b.V = omega_d(1) * std::cbrt(k) * (1 + 1e-9);
  const BetaResult r = beta_and_D(0.5, b);
  EXPECT_NEAR(b.V / (omega_d(1) * r.beta), 1.0, 1e-8);
  EXPECT_EQ(r.D, 2);
}

TEST(SphereProjection, DegenerateEpsThrows) {
  EXPECT_THROW(sphere_projection_construct(AnalyticManifold::circle(0.5, 80), 0.5), ContractError);
}

TEST(SphereProjection, SmallAmbientDimensionThrows) {
  EXPECT_THROW(sphere_projection_construct(AnalyticManifold::circle(0.5, 3), 0.05), ContractError);
}

TEST(SphereProjection, CircleStaysCloseAndIsExposed) {
  const double eps = 0.09;
  const auto m = AnalyticManifold::circle(0.5, 80);
  const SphereProjection sp = sphere_projection_construct(m, eps);
  const double s = sp.manifold.scale();
  std::vector<Vec> out = sp.manifold.uniform_sample(2000, 3);
  for (Vec& x : out) x /= s;
  const auto in = m.uniform_sample(2000, 4);
  EXPECT_LT(hausdorff_distance(in, out), eps * m.bounds().tau);

  const auto pts = sp.manifold.uniform_sample(1000, 5);
  const double R = sp.manifold.bounds().R;
  int failures = 0;
  for (const Vec& p : pts) {
    const Vec nu = (sp.ball_center - p).normalized();
    if (!check_exposedness(p, nu, pts, R * (1 + 1e-9))) ++failures;
  }
  EXPECT_EQ(failures, 0);
}

TEST(LocalGraph, CircleQuadraticBound) {
  const auto m = AnalyticManifold::circle(1.0);
  const LocalGraph g(m, Vec::Unit(2, 0));
  for (int k = -10; k <= 10; ++k) {
    Vec x(1);
    x << k / 80.0;
    EXPECT_LE(g.value(x).norm(), x(0) * x(0) + 1e-15);
  }
}

TEST(LocalGraph, FlatIsZero) {
  const auto m = AnalyticManifold::flat_disc(0.5, 2, 3);
  const LocalGraph g(m, Vec::Zero(3));
  Vec x(2);
  x << 0.05, -0.03;
  EXPECT_NEAR(g.value(x).norm(), 0.0, 1e-14);
}

TEST(LocalGraph, OffManifoldThrows) {
  Vec p(2);
  p << 1.0 + 1e-6, 0.0;
  EXPECT_THROW(LocalGraph(AnalyticManifold::circle(1.0), p), ContractError);
}

TEST(LocalGraph, DerivativeBoundsAndSlopes) {
  for (const auto& m : {AnalyticManifold::circle(0.8), AnalyticManifold::sphere(0.7),
                        AnalyticManifold::torus(0.6, 0.2), AnalyticManifold::ellipse(1.0, 0.5)}) {
    for (const Vec& p : m.uniform_sample(4, 21)) {
      const LocalGraph g(m, p);
      const auto r = g.check_bounds(m.dim() == 1 ? 41 : 9);
      EXPECT_LE(r.max_value_ratio, 1.0 + 1e-6) << to_string(m.kind());
      EXPECT_LE(r.max_slope_ratio, 15.0) << to_string(m.kind());
    }
  }
}

TEST(LocalGraph, ThirdOrderRemainderOnTorus) {
  const auto m = AnalyticManifold::torus(0.6, 0.2);
  const double lambda = m.bounds().Lambda;
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int bad = 0;
  const auto base = m.uniform_sample(10, 32);
  for (const Vec& p : base) {
    const LocalGraph g(m, p);
    const double h = g.radius() / 3.0;
    for (int k = 0; k < 100; ++k) {
      Vec x(2), y(2);
      x << h * u(rng), h * u(rng);
      y << h * u(rng), h * u(rng);
      const Vec lhs = g.value(x + y) - g.value(y) - g.differential(y) * x - g.value(x);
      if (lhs.norm() > 2.0 * lambda * x.squaredNorm() * y.norm() + 1e-9) ++bad;
    }
  }
  EXPECT_EQ(bad, 0);
}

TEST(LocalGraph, ProjectionCoversTangentBall) {
  for (const auto& m : {AnalyticManifold::circle(1.0), AnalyticManifold::sphere(0.8),
                        AnalyticManifold::torus(0.6, 0.2)}) {
    const Vec p = m.uniform_sample(1, 41).front();
    const LocalGraph g(m, p);
    const int d = m.dim();
    const double r = g.radius();
    const int per = d == 1 ? 21 : 9;
    for (int i = 0; i < per; ++i) {
      for (int j = 0; j < (d == 1 ? 1 : per); ++j) {
        Vec x(d);
        x(0) = -r + 2 * r * i / (per - 1);
        if (d == 2) x(1) = -r + 2 * r * j / (per - 1);
        if (x.norm() > r) continue;
        const Vec q = p + g.tangent().basis() * x + g.normal().basis() * g.value(x);
        EXPECT_LT(m.distance(q), 1e-6);
        EXPECT_LT((g.tangent().basis().transpose() * (q - p) - x).norm(), 1e-6);
      }
    }
  }
}

}  // namespace
}  // namespace mfit
