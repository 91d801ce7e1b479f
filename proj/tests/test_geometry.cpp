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
#include <vector>

#include "mfit/cone.hpp"
#include "mfit/errors.hpp"
#include "mfit/geometry.hpp"
#include "mfit/manifold.hpp"
#include "mfit/normal_bundle.hpp"

namespace mfit {
namespace {

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

Vec v3(double x, double y, double z) {
  Vec v(3);
  v << x, y, z;
  return v;
}

Subspace line(const Vec& dir) { return Subspace::span_of(dir); }

TEST(SubspaceDistance, IdenticalIsZero) {
  const Subspace x = Subspace::span_of(Mat::Random(5, 2));
  EXPECT_NEAR(subspace_distance(x, x), 0.0, 1e-12);
}

TEST(SubspaceDistance, OrthogonalLinesIsOne) {
  EXPECT_NEAR(subspace_distance(line(v2(1, 0)), line(v2(0, 1))), 1.0, 1e-12);
}

TEST(SubspaceDistance, ThirtyDegreesIsHalf) {
  const double t = std::numbers::pi / 6;
  EXPECT_NEAR(subspace_distance(line(v2(1, 0)), line(v2(std::cos(t), std::sin(t)))), 0.5, 1e-12);
}

TEST(SubspaceDistance, SymmetricAndBounded) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    const Subspace a = Subspace::span_of(Mat::Random(6, 2));
    const Subspace b = Subspace::span_of(Mat::Random(6, 2));
    const double ab = subspace_distance(a, b);
    EXPECT_NEAR(ab, subspace_distance(b, a), 1e-12);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0 + 1e-12);
  }
}

std::vector<Subspace> tangents_of(const AnalyticManifold& m, const std::vector<Vec>& pts) {
  std::vector<Subspace> t;
  for (const Vec& p : pts) t.push_back(m.tangent(p));
  return t;
}

TEST(FedererReach, UnitCircle) {
  const auto m = AnalyticManifold::circle(1.0);
  const auto pts = m.uniform_sample(10000, 1);
  EXPECT_NEAR(federer_reach_estimate(pts, tangents_of(m, pts)), 1.0, 1e-3);
}

TEST(FedererReach, SphereHalf) {
  const auto m = AnalyticManifold::sphere(0.5);
  const auto pts = m.uniform_sample(3000, 2);
  EXPECT_NEAR(federer_reach_estimate(pts, tangents_of(m, pts)), 0.5, 0.5e-3);
}

TEST(FedererReach, FlatIsInfinite) {
  const auto m = AnalyticManifold::flat_disc(0.5, 2, 3);
  const auto pts = m.uniform_sample(500, 3);
  EXPECT_TRUE(std::isinf(federer_reach_estimate(pts, tangents_of(m, pts))));
}

TEST(ReachInequality, TangentPointAlwaysHolds) {
  const Subspace t = line(v2(0, 1));
  EXPECT_TRUE(check_reach_inequality(v2(1, 0), v2(1, 0.7), t, 0.01));
}

TEST(ReachInequality, QuarterCircle) {
  const Subspace t = line(v2(0, 1));
  EXPECT_TRUE(check_reach_inequality(v2(1, 0), v2(0, 1), t, 1.0));
  EXPECT_FALSE(check_reach_inequality(v2(1, 0), v2(0, 1), t, 1.5));
}

TEST(ReachInequality, GeneratedManifoldsRespectDeclaredReach) {
  for (const auto& m : {AnalyticManifold::circle(0.8), AnalyticManifold::ellipse(1.0, 0.5),
                        AnalyticManifold::sphere(0.7), AnalyticManifold::torus(0.6, 0.2)}) {
    const auto pts = m.uniform_sample(200, 4);
    int bad = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Subspace t = m.tangent(pts[i]);
      for (std::size_t j = 0; j < pts.size(); ++j) {
        if (i == j) continue;
        if (!check_reach_inequality(pts[i], pts[j], t, m.bounds().tau * (1 - 1e-9))) ++bad;
      }
    }
    EXPECT_EQ(bad, 0) << to_string(m.kind());
  }
}

TEST(Exposedness, UnitSphereIdentity) {
  const auto m = AnalyticManifold::sphere(1.0);
  const auto pts = m.uniform_sample(1000, 5);
  double residual = 0.0;
  for (std::size_t i = 0; i < 50; ++i) {
    const Vec& p = pts[i];
    EXPECT_TRUE(check_exposedness(p, -p, pts, 1.0 + 1e-12));
    for (const Vec& q : pts) {
      residual = std::max(residual, std::abs((1.0 - q.dot(p)) - (q - p).squaredNorm() / 2.0));
    }
  }
  EXPECT_LT(residual, 1e-10);
}

TEST(Exposedness, HalfRadiusFails) {
  const Vec p = v3(0, 0, 1);
  const std::vector<Vec> q = {-p};
  EXPECT_FALSE(check_exposedness(p, -p, q, 0.5));
}

TEST(Exposedness, NearbyPointAnyRadius) {
  const Vec p = v3(0, 0, 1);
  const std::vector<Vec> q = {Vec(p + 1e-3 * -p)};
  for (double r : {0.01, 1.0, 100.0}) EXPECT_TRUE(check_exposedness(p, -p, q, r));
}

TEST(Hausdorff, Basics) {
  const std::vector<Vec> a = {v2(0.3, 0.4)};
  const std::vector<Vec> zero = {v2(0, 0)};
  EXPECT_EQ(hausdorff_distance(a, a), 0.0);
  EXPECT_NEAR(hausdorff_distance(zero, a), 0.5, 1e-15);
}

TEST(Hausdorff, ConcentricCircles) {
  std::vector<Vec> a, b;
  for (int k = 0; k < 1000; ++k) {
    const double t = 2 * std::numbers::pi * k / 1000;
    a.push_back(v2(std::cos(t), std::sin(t)));
    b.push_back(1.1 * v2(std::cos(t + 0.5), std::sin(t + 0.5)));
  }
  const double resolution = 1.1 * 2 * std::numbers::pi / 1000;
  EXPECT_NEAR(hausdorff_distance(a, b), 0.1, resolution);
}

Cone ray(const Vec& g) { return Cone::generated(g); }

TEST(ConeDistance, EqualCones) {
  const Cone k = ray(v2(1, 1).normalized());
  const auto [direct, polar] = polar_cone_distance_pair(k, k, 2000);
  EXPECT_NEAR(direct.estimate, 0.0, 1e-12);
  EXPECT_NEAR(polar.estimate, 0.0, 1e-12);
}

TEST(ConeDistance, OrthogonalRays) {
  const auto [direct, polar] = polar_cone_distance_pair(ray(v2(1, 0)), ray(v2(0, 1)), 10000);
  EXPECT_GT(direct.estimate, 0.0);
  EXPECT_LE(direct.estimate, 2.0);
  EXPECT_NEAR(direct.estimate, 1.0, 1e-3);
  EXPECT_NEAR(direct.estimate, polar.estimate, 0.02);
}

TEST(ConeDistance, PolarEqualityOnRandomPlanarPairs) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
  std::uniform_real_distribution<double> width(0.0, 2.5);
  for (int k = 0; k < 20; ++k) {
    auto wedge = [&] {
      const double a = angle(rng), w = width(rng);
      Mat g(2, 2);
      g << std::cos(a), std::cos(a + w), std::sin(a), std::sin(a + w);
      return Cone::generated(g);
    };
    const auto [direct, polar] = polar_cone_distance_pair(wedge(), wedge(), 10000);
    EXPECT_NEAR(direct.estimate, polar.estimate, 2 * std::max(direct.resolution, polar.resolution));
  }
}

TEST(NormalCone, TriangleVertex) {
  const std::vector<Vec> tri = {v2(0, 0), v2(1, 0), v2(0, 1)};
  const Cone k = normal_cone_at(tri, tri[0]);
  EXPECT_EQ(k.form(), Cone::Form::Generated);
  EXPECT_EQ(k.vectors().cols(), 2);
  EXPECT_TRUE(k.contains(v2(-1, -1)));
  EXPECT_TRUE(k.contains(v2(-1, 0)));
  EXPECT_FALSE(k.contains(v2(1, 0)));
  EXPECT_FALSE(k.contains(v2(-1, 0.1)));
}

TEST(NormalCone, InteriorPointThrows) {
  const std::vector<Vec> tri = {v2(0, 0), v2(1, 0), v2(0, 1), v2(0.2, 0.2)};
  EXPECT_THROW(normal_cone_at(tri, tri[3]), ContractError);
}

TEST(NormalCone, DenseCircleNarrowsToRadius) {
  double previous = kInf;
  for (int count : {64, 512}) {
    std::vector<Vec> hull;
    for (int k = 0; k < count; ++k) {
      const double t = 2 * std::numbers::pi * k / count;
      hull.push_back(v2(std::cos(t), std::sin(t)));
    }
    const Cone k = normal_cone_at(hull, hull[0]);
    double widest = 0.0;
    for (const Vec& u : k.unit_samples(200, 1)) widest = std::max(widest, (u - hull[0]).norm());
    EXPECT_LT(widest, previous);
    previous = widest;
  }
  EXPECT_LT(previous, 0.02);
}

TEST(Cone, BipolarMembership) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 5; ++trial) {
    Mat gens(3, 3);
    for (int i = 0; i < 9; ++i) gens(i % 3, i / 3) = g(rng);
    const Cone k = Cone::generated(gens);
    const Cone kpolar = Cone::constrained(gens, 3);
    int mismatches = 0;
    for (int t = 0; t < 200; ++t) {
      const Vec x = v3(g(rng), g(rng), g(rng));
      const bool in_bipolar = kpolar.project(x).norm() <= 1e-8;
      if (in_bipolar != k.contains(x, 1e-8)) ++mismatches;
    }
    EXPECT_EQ(mismatches, 0);
  }
}

TEST(ShapeOperator, ZeroNormalGivesZeroMap) {
  const auto m = AnalyticManifold::circle(1.0);
  const auto form = m.second_fundamental_form(v2(1, 0));
  EXPECT_NEAR(shape_operator(form, Vec::Zero(2)).norm(), 0.0, 1e-15);
}

TEST(ShapeOperator, CircleUnitDeterminant) {
  const auto m = AnalyticManifold::circle(1.0);
  const auto form = m.second_fundamental_form(v2(1, 0));
  EXPECT_NEAR(std::abs(shape_operator(form, v2(-1, 0)).determinant()), 1.0, 1e-9);
}

TEST(ShapeOperator, SphereDeterminant) {
  const double r = 0.5;
  const auto m = AnalyticManifold::sphere(r);
  const Vec p = v3(0, 0, r);
  const auto form = m.second_fundamental_form(p);
  EXPECT_NEAR(std::abs(shape_operator(form, v3(0, 0, -1)).determinant()), 1.0 / (r * r), 1e-8);
}

TEST(ShapeOperator, NormBoundedByInverseReach) {
  const auto m = AnalyticManifold::ellipse(1.0, 0.5);
  for (const Vec& p : m.uniform_sample(100, 6)) {
    const auto form = m.second_fundamental_form(p);
    const Vec nu = m.normal_space(p).basis().col(0);
    EXPECT_LE(operator_norm(shape_operator(form, nu)), 1.0 / m.bounds().tau + 1e-9);
  }
}

TEST(NormalBundle, CircleVolumeAndThickness) {
  const auto m = AnalyticManifold::circle(1.0);
  const ConeVolumeReport r = cone_volume_checks(m);
  EXPECT_GE(r.integral + 3 * r.integral_sigma, std::numbers::pi);
  EXPECT_GE(r.min_thick_radius, 0.5 - 1e-9);
  EXPECT_GE(r.deep_fraction + 3 * r.deep_sigma, r.deep_bound);
  EXPECT_TRUE(r.passed());
}

TEST(NormalBundle, SphereThickness) {
  ConeVolumeOptions o;
  o.points = 40;
  o.hull_per_dim = 64;
  const ConeVolumeReport r = cone_volume_checks(AnalyticManifold::sphere(1.0), o);
  EXPECT_GE(r.min_thick_radius, 0.5 - 1e-6);
}

}  // namespace
}  // namespace mfit
