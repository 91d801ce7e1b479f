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


#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "mfit/geometry.hpp"
#include "mfit/manifold.hpp"

namespace mfit {

// log P(Z > x) for a standard normal Z, accurate far into both tails.
double log_normal_tail(double x);
// log of the standard normal density.
double log_normal_density(double x);

enum class ThresholdMode {
  Literal,     // Gamma_delta and r_delta by the closed forms
  Calibrated,  // slab count threshold with a reference-model offset
};

// Constants of the slab-histogram support estimator. Quantities that leave
// double range at desk scale are kept as logarithms.
struct SupportOracleParams {
  double eps = 0.0;
  double delta = 0.0;  // eps / 16
  double sigma = 0.0;
  double eta = 0.1;
  GeometricBounds bounds;
  double kappa0 = 0.0;
  double kappa1 = 0.0;
  double log_gamma_delta = 0.0;
  double r_delta = 0.0;
  long long j_minus = 0;
  long long j_plus = 0;
  double log_D0 = 0.0;         // derivative bound of the distance map
  double log_a_threshold = 0.0;  // uniform deviation level, delta^2 / (6 D0)

  ThresholdMode mode = ThresholdMode::Literal;
  // Calibrated mode only: slab count c with Gamma_delta = c / (N delta).
  long long slab_count = 0;
  long long samples = 0;

  double gamma_delta() const;
};

// Throws ContractError unless 0 < eps < min(1/16, sigma/tau, sigma^2/tau).
SupportOracleParams make_params(const GeometricBounds& bounds, double sigma, double eps,
                                double eta = 0.1);

// Desk-scale variant: the threshold is `slab_count` points per slab for
// batches of `samples` points, and r_delta is the mean first-crossing
// offset for a reach-tau sphere under the same noise, averaged over
// `phases` grid placements. The scan range keeps ceil(eps/delta) slabs of
// headroom above j_plus.
struct CalibrationOptions {
  long long slab_count = 200;
  int phases = 4;
};
SupportOracleParams calibrate(const SupportOracleParams& params, long long samples,
                              const CalibrationOptions& options = {});

// Same bracket as make_params for a given offset.
void set_scan_range(SupportOracleParams& params, long long extra_slabs = 0);

struct SupportEstimate {
  Vec b;
  double s_est = 0.0;
  long long j_star = 0;
  bool failed = false;
  long long samples_used = 0;
};

// (1 / (N delta)) #{i : gamma < t_i <= gamma + delta}.
double slab_fraction(std::span<const double> projections, double gamma, double delta);
// Points are the columns of `points`.
double slab_fraction(const Mat& points, const Vec& b, double gamma, double delta);
double slab_fraction(const std::vector<Vec>& points, const Vec& b, double gamma, double delta);

// Scan j = j_minus + 1, ..., j_plus for the first slab at or below the
// threshold. A crossing at j_plus itself counts; failure (no crossing) is
// reported in the result.
SupportEstimate find_distance(std::span<const double> projections, const Vec& b,
                              const SupportOracleParams& params);
SupportEstimate find_distance(const Mat& points, const Vec& b, const SupportOracleParams& params);
SupportEstimate find_distance(const std::vector<Vec>& points, const Vec& b,
                              const SupportOracleParams& params);

// Noise-free law of <X, b> for X = x + N(0, sigma^2 I), x uniform on m.
// Built once per direction; all evaluations are in log space.
class ProjectedDensity {
 public:
  // `reference` is a gamma near which accuracy matters most (the scan
  // level); it sets the refinement width around the support point.
  ProjectedDensity(const AnalyticManifold& m, const Vec& b, double sigma, double reference,
                   int order = 8);

  double support() const { return support_; }
  // log Gamma(H_{gamma, b}): the density of <X, b> at gamma.
  double log_density(double gamma) const;
  // log P(<X, b> > gamma).
  double log_tail(double gamma) const;
  // log P(<X, b> <= gamma).
  double log_cdf(double gamma) const;
  // log of (1/delta) * integral of the density over (gamma, gamma + delta].
  double log_slab_average(double gamma, double delta) const;

 private:
  std::vector<ProjectionNode> nodes_;
  double sigma_;
  double support_;
};

// Gamma(H_{gamma, b}) by quadrature. Order-8 panels are checked against
// order 16; a relative disagreement above 1e-6 throws with the residual.
double log_gamma_exact(const AnalyticManifold& m, double sigma, double gamma, const Vec& b);
double gamma_exact(const AnalyticManifold& m, double sigma, double gamma, const Vec& b);

// Find-Distance against the exact slab averages of m instead of samples.
// Uses the literal threshold, or the Poisson mean count for calibrated params.
SupportEstimate find_distance_exact(const AnalyticManifold& m, const Vec& b,
                                    const SupportOracleParams& params);

// l(Gamma) = sqrt(2 sigma^2 log(1 / (Gamma kappa))), from log Gamma.
double ell(double log_gamma, double kappa, double sigma);

struct DistanceSandwich {
  double lower = 0.0;  // -delta tau + l(Gamma) with kappa1
  double upper = 0.0;  // l(Gamma) with kappa0
  double gap() const { return upper - lower; }
  // sigma log(kappa1/kappa0) <= delta tau sqrt(2 log(1 / (Gamma kappa1)))
  bool gap_hypothesis = false;
};
DistanceSandwich distance_sandwich(double log_gamma, const SupportOracleParams& params);

// log10 of the sufficient sample count for the estimator with confidence
// 1 - eta (c = 1). Never materialized as an integer.
double theoretical_sample_bound(const SupportOracleParams& params);

struct GlivenkoCantelliReport {
  std::vector<double> sup_deviation;  // per trial, sup over gammas and directions
  double a_threshold = 0.0;
  double exceed_fraction = 0.0;
};
// Sup over the gamma grid and directions of |F_N(gamma) - P(<X,b> > gamma)|
// for each trial's points, with the expectation taken from m.
GlivenkoCantelliReport glivenko_cantelli_check(const std::vector<Mat>& trials,
                                               const std::vector<Vec>& directions,
                                               std::span<const double> gammas,
                                               const AnalyticManifold& m, double sigma,
                                               double a_threshold);
// Sup of |F_N(gamma) - F(gamma)| for an arbitrary expected upper tail.
template <class Tail>
double empirical_tail_deviation(std::span<const double> projections,
                                std::span<const double> gammas, Tail&& expected_tail) {
  std::vector<double> sorted(projections.begin(), projections.end());
  std::sort(sorted.begin(), sorted.end());
  double worst = 0.0;
  const double n = static_cast<double>(sorted.size());
  for (double g : gammas) {
    const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), g);
    const double f = static_cast<double>(above) / n;
    worst = std::max(worst, std::abs(f - expected_tail(g)));
  }
  return worst;
}

}  // namespace mfit
