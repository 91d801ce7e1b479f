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
#include <sstream>

#include "mfit/atlas.hpp"
#include "mfit/errors.hpp"
#include "mfit/geometry.hpp"
#include "mfit/implicit.hpp"
#include "mfit/manifold.hpp"

namespace mfit {
namespace {

constexpr double kResolution = 0.01;

Vec pt(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

Vec on_circle(double angle) { return pt(std::cos(angle), std::sin(angle)); }

// Unit circle sampled at arc spacing kResolution.
std::vector<Vec> circle_net() {
  const int count = static_cast<int>(std::ceil(2 * std::numbers::pi / kResolution));
  std::vector<Vec> out;
  for (int k = 0; k < count; ++k) out.push_back(on_circle(2 * std::numbers::pi * k / count));
  return out;
}

double min_pairwise(const std::vector<Vec>& pts) {
  double best = 1e300;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::min(best, (pts[i] - pts[j]).norm());
  return best;
}

ImplicitManifold single_disc() {
  Mat frame = Mat::Zero(2, 1);
  frame(0, 0) = 1.0;
  return ImplicitManifold(make_atlas({pt(0, 0)}, {frame}, 1.0), {1.0});
}

struct CircleFit {
  DiscAtlas atlas;
  AtlasReport report;
  WeightReport weights_report;
  ImplicitManifold im;
};

const CircleFit& circle_fit() {
  static const CircleFit fit = [] {
    CircleFit f;
    const auto net = circle_net();
    f.atlas = build_atlas(net, 1, 1.0, {}, &f.report);
    const auto tube = atlas_tube_samples(f.atlas, 50, 3);
    auto w = bump_weights_solve(f.atlas, tube, {}, &f.weights_report);
    GeometricBounds b;
    b.d = 1;
    b.n = 2;
    b.V = 2 * std::numbers::pi;
    f.im = ImplicitManifold(f.atlas, std::move(w), b);
    return f;
  }();
  return fit;
}

TEST(Subnet, SmallScaleKeepsEverything) {
  const auto net = circle_net();
  EXPECT_EQ(subnet(net, 0.5 * kResolution).size(), net.size());
}

TEST(Subnet, CircleAtScaleTwoTenths) {
  const auto net = circle_net();
  const auto sub = subnet(net, 0.2);
  // Greedy steps along the net advance between 0.2 and 0.2 + resolution of arc.
  const double count = static_cast<double>(sub.size());
  EXPECT_GE(count, std::floor(2 * std::numbers::pi / (0.2 + kResolution)));
  EXPECT_LE(count, std::ceil(2 * std::numbers::pi / 0.2));
  EXPECT_GE(min_pairwise(sub), 0.2);
  for (const Vec& x : net) {
    double best = 1e300;
    for (const Vec& y : sub) best = std::min(best, (x - y).norm());
    EXPECT_LT(best, 0.2);
  }
}

TEST(Subnet, SinglePointAndEmpty) {
  const std::vector<Vec> one{pt(0.3, 0.4)};
  EXPECT_EQ(subnet(one, 1.0), one);
  EXPECT_THROW(subnet(std::vector<Vec>{}, 1.0), ContractError);
  EXPECT_THROW(subnet(one, 0.0), ContractError);
}

TEST(FindDisc, ExactFrameSelected) {
  Vec base = Vec::Zero(3);
  std::vector<Vec> cands{Vec::Constant(3, 0.3), Vec::Unit(3, 1), Vec::Constant(3, 2.0),
                         Vec::Unit(3, 2), 0.7 * Vec::Unit(3, 1) + 0.7 * Vec::Unit(3, 2)};
  const auto pick = find_disc(base, cands, 2);
  ASSERT_EQ(pick.size(), 2u);
  EXPECT_EQ(pick[0], 1);
  EXPECT_EQ(pick[1], 3);
}

TEST(FindDisc, CirclePicksUnitDistanceNeighbour) {
  const Vec base = on_circle(0.0);
  std::vector<Vec> cands;
  for (double a : {0.3, 0.9, 1.05, 1.6}) cands.push_back(on_circle(a));
  // Chord lengths 2 sin(a/2): 0.298, 0.870, 1.001, 1.435.
  EXPECT_EQ(find_disc(base, cands, 1), std::vector<int>{2});
}

TEST(FindDisc, DuplicatesResolveToLowestIndex) {
  const std::vector<Vec> cands{pt(0, 2), pt(1, 0), pt(1, 0)};
  EXPECT_EQ(find_disc(pt(0, 0), cands, 1), std::vector<int>{1});
}

TEST(FindDisc, TooFewCandidatesThrows) {
  const std::vector<Vec> cands{Vec::Unit(3, 0)};
  EXPECT_THROW(find_disc(Vec::Zero(3), cands, 2), ContractError);
}

TEST(FineTune, PlaneSamplesHaveZeroResidual) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  Mat plane = Mat::Zero(3, 2);
  plane(0, 0) = 1;
  plane(1, 1) = std::cos(0.2);
  plane(2, 1) = std::sin(0.2);
  std::vector<Vec> samples;
  for (int k = 0; k < 30; ++k) samples.push_back(plane * pt(u(rng), u(rng)));
  const FineTuneResult r = fine_tune_disc(Vec::Zero(3), samples, Mat::Identity(3, 2));
  EXPECT_NEAR(r.residual, 0.0, 1e-20);
  EXPECT_NEAR(subspace_distance(Subspace::from_orthonormal(r.frame), Subspace::from_orthonormal(plane)),
              0.0, 1e-10);
}

TEST(FineTune, TiltedCircleFrameImproves) {
  std::vector<Vec> samples;
  for (int k = -15; k <= 15; ++k) samples.push_back(on_circle(0.01 * k));
  const double tilt = 0.1;
  Mat frame(2, 1);
  frame << std::sin(tilt), std::cos(tilt);
  const FineTuneResult r = fine_tune_disc(on_circle(0.0), samples, frame);
  EXPECT_TRUE(r.improved);
  const double refined = std::asin(std::min(1.0, std::abs(r.frame(0, 0))));
  EXPECT_LT(refined, tilt);
  EXPECT_LE(r.residual, r.putative_residual);
}

TEST(FineTune, MinimumSampleCount) {
  std::vector<Vec> samples;
  for (int k = 0; k < 10; ++k) samples.push_back(on_circle(0.01 * (k - 5)));
  Mat frame(2, 1);
  frame << 0.0, 1.0;
  EXPECT_TRUE(std::isfinite(fine_tune_disc(on_circle(0.0), samples, frame).residual));
  samples.pop_back();
  EXPECT_THROW(fine_tune_disc(on_circle(0.0), samples, frame), ContractError);
}

TEST(FineTune, DegenerateDesignKeepsFrame) {
  const std::vector<Vec> samples(12, pt(1.0, 0.0));
  Mat frame(2, 1);
  frame << 0.0, 1.0;
  const FineTuneResult r = fine_tune_disc(pt(1.0, 0.0), samples, frame);
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.frame, frame);
}

TEST(Weights, SingleDiscCentreIsOne) {
  const auto im = single_disc();
  const std::vector<Vec> tube{pt(0, 0), pt(0.01, 0.0)};
  const auto w = bump_weights_solve(im.atlas(), tube);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_DOUBLE_EQ(ImplicitManifold(im.atlas(), w).alpha_tilde(pt(0, 0)), 1.0);
}

TEST(Weights, OutsideSupportThrows) {
  const auto im = single_disc();
  const std::vector<Vec> tube{pt(0, 0), pt(3, 0)};
  EXPECT_THROW(bump_weights_solve(im.atlas(), tube), ContractError);
}

TEST(Weights, CircleAtlasBand) {
  const auto& fit = circle_fit();
  EXPECT_TRUE(fit.weights_report.within_budget);
  const auto tube = atlas_tube_samples(fit.atlas, 10000 / static_cast<int>(fit.atlas.size()) + 1, 99);
  double lo = 1e300, hi = 0.0;
  for (const Vec& z : tube) {
    const double a = fit.im.alpha_tilde(z);
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  EXPECT_GT(lo, 0.1);
  EXPECT_LT(hi, 10.0);
}

TEST(Bump, VanishesToSecondOrderAtBoundary) {
  const auto im = single_disc();
  const double h = 1e-4;
  auto f = [&](double t) { return im.bump(0, pt(t, 0)); };
  EXPECT_EQ(f(1.0), 0.0);
  EXPECT_NEAR((f(1.0) - f(1.0 - h)) / h, 0.0, 1e-6);
  EXPECT_NEAR((f(1.0) - 2 * f(1.0 - h) + f(1.0 - 2 * h)) / (h * h), 0.0, 1e-2);
  EXPECT_EQ(f(1.5), 0.0);
}

TEST(Frec, ZeroAtIsolatedCentre) {
  Mat frame = Mat::Zero(2, 1);
  frame(0, 0) = 1.0;
  const auto atlas = make_atlas({pt(0, 0), pt(5, 0)}, {frame, frame}, 1.0);
  const ImplicitManifold im(atlas, {1.0, 1.0});
  EXPECT_EQ(evaluate_Frec(im, pt(5, 0)).value.norm(), 0.0);
}

TEST(Frec, SingleDiscIsNormalOffset) {
  const auto im = single_disc();
  const FrecValue v = evaluate_Frec(im, pt(0.3, 0.2));
  EXPECT_NEAR(v.value(0), 0.0, 1e-15);
  EXPECT_NEAR(v.value(1), 0.2, 1e-15);
  EXPECT_THROW(evaluate_Frec(im, pt(2.0, 0.0)), ContractError);
}

TEST(Frec, SmallOnTrueCircle) {
  const auto& fit = circle_fit();
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    worst = std::max(worst, evaluate_Frec(fit.im, on_circle(2 * std::numbers::pi * k / 1000)).value.norm());
  }
  // C_frob d (net resolution) with C_frob = 2, d = 1.
  EXPECT_LE(worst, 2 * 1 * kResolution);
}

TEST(Frec, PartitionOfUnityAndProjector) {
  const auto& fit = circle_fit();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 2 * std::numbers::pi);
  for (int k = 0; k < 200; ++k) {
    const Vec x = (1.0 + 0.05 * std::sin(3.0 * k)) * on_circle(u(rng));
    double total = 0.0;
    for (const auto& [i, a] : fit.im.partition(x)) total += a;
    EXPECT_NEAR(total, 1.0, 1e-10);
    const Mat p = fit.im.evaluate(x).projector;
    EXPECT_LE((p * p - p).norm(), 1e-9);
    EXPECT_LE((p - p.transpose()).norm(), 1e-12);
    EXPECT_NEAR(p.trace(), 1.0, 1e-9);
  }
}

TEST(Frec, ProjectorGapWithinBound) {
  const auto& fit = circle_fit();
  EXPECT_LT(fit.report.max_projector_gap, fit.report.projector_gap_bound);
  EXPECT_DOUBLE_EQ(max_projector_gap(fit.atlas), fit.report.max_projector_gap);
}

TEST(SpectralProjector, ContourAgreesOnRandomAdmissibleMatrices) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> hi(0.55, 1.45), lo(-0.45, 0.45);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 5, rank = 3;
    const Mat q = Subspace::span_of(Mat::Random(n, n)).basis();
    Vec eig(n);
    for (int k = 0; k < n; ++k) eig(k) = k < rank ? hi(rng) : lo(rng);
    const Mat a = q * eig.asDiagonal() * q.transpose();
    EXPECT_LE((spectral_projector(a, rank) - contour_projector(a)).norm(), 1e-6);
  }
}

TEST(SpectralProjector, MissingGapThrows) {
  Vec eig(3);
  eig << 1.0, 0.5, 0.0;
  EXPECT_THROW(spectral_projector(Mat(eig.asDiagonal()), 1), ContractError);
}

TEST(Projection, PointOnZeroSetIsFixed) {
  const auto im = single_disc();
  const ProjectionResult r = project_to_Mrec(im, pt(0.4, 0.0));
  EXPECT_EQ(r.point, pt(0.4, 0.0));
}

TEST(Projection, SingleDiscFootOfPerpendicular) {
  const auto im = single_disc();
  const ProjectionResult r = project_to_Mrec(im, pt(-0.3, 0.25));
  EXPECT_NEAR((r.point - pt(-0.3, 0.0)).norm(), 0.0, 1e-12);
}

TEST(Projection, CircleRadialOffsetConverges) {
  const auto& fit = circle_fit();
  for (double a : {0.2, 1.9, 4.4}) {
    const ProjectionResult r = project_to_Mrec(fit.im, 1.05 * on_circle(a));
    EXPECT_LT(r.residual, 1e-9);
    EXPECT_NEAR(r.point.norm(), 1.0, 2 * kResolution);
  }
}

TEST(Reconstruction, CircleAtlasWithinTwiceResolution) {
  const auto& fit = circle_fit();
  const auto m = AnalyticManifold::circle(1.0);
  const ReconstructionMetrics r = evaluate_reconstruction(fit.im, m, {.seeds = 500});
  EXPECT_LE(r.hausdorff, 2 * kResolution);
  EXPECT_GT(r.reach, 0.0);
  EXPECT_GT(r.reach_ratio, 0.0);
}

TEST(Reconstruction, SingleDiscIsFlat) {
  const auto im = single_disc();
  const auto m = AnalyticManifold::flat_disc(0.5, 1, 2);
  const ReconstructionMetrics r = evaluate_reconstruction(im, m, {.seeds = 100});
  EXPECT_TRUE(std::isinf(r.reach));
  EXPECT_NEAR(r.hausdorff, 0.0, 1e-9);
}

TEST(Serialization, RoundTripIsExact) {
  const auto& fit = circle_fit();
  std::stringstream s;
  write_implicit(s, fit.im);
  const ImplicitManifold back = read_implicit(s);
  ASSERT_EQ(back.atlas().size(), fit.im.atlas().size());
  EXPECT_EQ(back.weights(), fit.im.weights());
  EXPECT_EQ(back.atlas().radius, fit.im.atlas().radius);
  for (double a : {0.1, 2.0, 5.0}) {
    EXPECT_EQ(evaluate_Frec(back, on_circle(a)).value, evaluate_Frec(fit.im, on_circle(a)).value);
  }
}

TEST(Serialization, MalformedInputThrows) {
  std::stringstream s("mfit-implicit 1\ndim 1\nambient 2\ndiscs 1\ncenter 0\n");
  EXPECT_THROW(read_implicit(s), FormatError);
  std::stringstream v("mfit-implicit 9\n");
  EXPECT_THROW(read_implicit(v), FormatError);
}

}  // namespace
}  // namespace mfit
