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
#include "mfit/noise_pca.hpp"

namespace mfit {
namespace {

TEST(GaussianNoise, DensityAtZero) {
  std::mt19937_64 rng(1);
  const double h = 0.02;
  int near = 0;
  for (int k = 0; k < 1000000; ++k) near += std::abs(gaussian_noise(1, 1.0, rng)(0)) < h ? 1 : 0;
  EXPECT_NEAR(near / (1e6 * 2 * h), 1.0 / std::sqrt(2 * std::numbers::pi), 0.01);
}

TEST(GaussianNoise, CoordinateVariance) {
  const double sigma = 0.3;
  std::mt19937_64 rng(2);
  double sum2 = 0.0;
  const int count = 100000;
  for (int k = 0; k < count; ++k) sum2 += std::pow(gaussian_noise(1, sigma, rng)(0), 2);
  const double s2 = sigma * sigma;
  EXPECT_NEAR(sum2 / count, s2, 3 * s2 * std::sqrt(2.0 / count));
}

TEST(GaussianNoise, NonPositiveSigmaThrows) {
  EXPECT_THROW(gaussian_noise(3, 0.0, 1), ContractError);
  EXPECT_THROW(gaussian_noise(3, -1.0, 1), ContractError);
}

TEST(Observations, ZeroNoiseIsClean) {
  const auto d = generate_observations(AnalyticManifold::circle(1.0), 100, 0.0, 5);
  for (std::size_t i = 0; i < d.clean.size(); ++i) EXPECT_EQ(d.clean[i], d.observed[i]);
}

TEST(Observations, MeanAndNoiseEnergy) {
  const double sigma = 0.2;
  const int count = 100000;
  const auto d = generate_observations(AnalyticManifold::circle(1.0), count, sigma, 6);
  Vec mean = Vec::Zero(2);
  double energy = 0.0;
  for (int i = 0; i < count; ++i) {
    mean += d.observed[i];
    energy += (d.observed[i] - d.clean[i]).squaredNorm();
  }
  mean /= count;
  // Per coordinate the observed spread is sqrt(1/2 + sigma^2).
  const double spread = std::sqrt(0.5 + sigma * sigma);
  EXPECT_LT(mean.cwiseAbs().maxCoeff(), 3 * spread / std::sqrt(count));
  EXPECT_NEAR(energy / count, 2 * sigma * sigma, 3 * 2 * sigma * sigma * std::sqrt(2.0 / (2 * count)));
}

GeometricBounds circle_bounds(int n) {
  GeometricBounds b;
  b.d = 1;
  b.n = n;
  b.tau = 1.0;
  b.V = 2 * std::numbers::pi;
  return b;
}

TEST(NdSampleSize, FrozenValue) {
  // mpmath: floor(64 (10 s^2 + s^2 log(64*10*s^2/(eps*delta))) sqrt(log(64/delta)) 3/eps^2)
  // with s = 0.5, eps = 0.05, delta = 0.1.
  EXPECT_EQ(nd_sample_size(circle_bounds(10), 0.5, 0.05, 0.1, 3, 64.0), 994333.0);
}

TEST(NdSampleSize, LinearInDimension) {
  const double one = nd_sample_size(circle_bounds(10), 0.5, 0.05, 0.1, 3);
  const double two = nd_sample_size(circle_bounds(10), 0.5, 0.05, 0.1, 6);
  EXPECT_NEAR(two, 2 * one, 1.0);
}

TEST(NdSampleSize, MonotoneInConstant) {
  double last = 0.0;
  for (double c : {16.0, 32.0, 64.0, 128.0}) {
    const double v = nd_sample_size(circle_bounds(10), 0.5, 0.05, 0.1, 3, c);
    EXPECT_GT(v, last);
    last = v;
  }
}

TEST(Pca, PlaneDataHasZeroObjective) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  const Mat basis = Subspace::span_of(Mat::Random(6, 2)).basis();
  Vec offset = Vec::Random(6);
  std::vector<Vec> pts;
  for (int k = 0; k < 50; ++k) {
    Vec c(2);
    c << g(rng), g(rng);
    pts.push_back(offset + basis * c);
  }
  const PcaResult r = pca_fit(pts, 2);
  EXPECT_NEAR(r.objective, 0.0, 1e-20 + 1e-12 * 50);
  EXPECT_NEAR(subspace_distance(r.subspace, Subspace::from_orthonormal(basis)), 0.0, 1e-9);
}

TEST(Pca, IsotropicCloudObjective) {
  const int n = 5, count = 20000;
  std::mt19937_64 rng(8);
  std::vector<Vec> pts;
  double total = 0.0;
  for (int k = 0; k < count; ++k) pts.push_back(gaussian_noise(n, 1.0, rng));
  Vec mean = Vec::Zero(n);
  for (const Vec& p : pts) mean += p;
  mean /= count;
  for (const Vec& p : pts) total += (p - mean).squaredNorm();
  const PcaResult r = pca_fit(pts, 1);
  EXPECT_NEAR(r.objective / total, (n - 1.0) / n, 0.02);
}

TEST(Pca, RotationInvariance) {
  std::mt19937_64 rng(9);
  std::vector<Vec> pts;
  for (int k = 0; k < 300; ++k) pts.push_back(gaussian_noise(4, 1.0, rng).cwiseProduct(Vec::LinSpaced(4, 1, 4)));
  const Mat q = Subspace::span_of(Mat::Random(4, 4)).basis();
  std::vector<Vec> rotated;
  for (const Vec& p : pts) rotated.push_back(q * p);
  const PcaResult a = pca_fit(pts, 2);
  const PcaResult b = pca_fit(rotated, 2);
  EXPECT_NEAR(a.objective, b.objective, 1e-8 * a.objective);
  EXPECT_NEAR(subspace_distance(Subspace::span_of(q * a.subspace.basis()), b.subspace), 0.0, 1e-8);
}

TEST(Pca, RankDeficientIsPadded) {
  std::vector<Vec> pts;
  for (int k = 0; k < 10; ++k) pts.push_back(Vec::Unit(4, 0) * k);
  const PcaResult r = pca_fit(pts, 2);
  EXPECT_TRUE(r.padded);
  EXPECT_EQ(r.subspace.dim(), 2);
}

TEST(Pca, NoiselessManifoldSamplesSpanningD) {
  const auto m = AnalyticManifold::circle(0.8, 6);
  const auto pts = m.uniform_sample(3, 10);
  EXPECT_NEAR(pca_fit(pts, 2).objective, 0.0, 1e-20);
}

TEST(Pca, ProjectionIsContraction) {
  std::mt19937_64 rng(11);
  std::vector<Vec> pts;
  for (int k = 0; k < 100; ++k) pts.push_back(gaussian_noise(5, 1.0, rng));
  const PcaResult r = pca_fit(pts, 2);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    EXPECT_LE(r.subspace.project(pts[i] - pts[i + 1]).norm(), (pts[i] - pts[i + 1]).norm() + 1e-12);
  }
}

TEST(ProjectionBounds, ContainingSubspacePasses) {
  const auto m = AnalyticManifold::circle(1.0, 4);
  const Subspace s = Subspace::span_of(Mat::Identity(4, 3));
  const ProjectionReport r = verify_projection_bounds(m, s, Vec::Zero(4), 0.3);
  EXPECT_NEAR(r.sup_distance, 0.0, 1e-12);
  EXPECT_TRUE(r.passed());
}

TEST(ProjectionBounds, TiltedCircle) {
  const double tilt = 0.05;
  Mat frame = Mat::Zero(3, 2);
  frame(0, 0) = 1.0;
  frame(1, 1) = std::cos(tilt);
  frame(2, 1) = std::sin(tilt);
  const auto m = AnalyticManifold::circle(1.0, 3, Vec(), frame);
  const Subspace s = Subspace::span_of(Mat::Identity(3, 2));
  // sup dist = sin(tilt) = alpha^2 tau.
  const double alpha = std::sqrt(std::sin(tilt) * 1.0001);
  const ProjectionReport r = verify_projection_bounds(m, s, Vec::Zero(3), alpha);
  EXPECT_NEAR(r.sup_distance, std::sin(tilt), 1e-3);
  EXPECT_LE(r.max_tangent_angle, 3 * alpha);
  EXPECT_TRUE(r.tangent_ok);
}

TEST(ProjectionBounds, HypothesisViolationThrows) {
  const auto m = AnalyticManifold::circle(1.0, 3);
  const Subspace s = Subspace::span_of(Vec::Unit(3, 0));
  EXPECT_THROW(verify_projection_bounds(m, s, Vec::Zero(3), 0.1), ContractError);
}

}  // namespace
}  // namespace mfit
