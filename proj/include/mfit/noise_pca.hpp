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

#include <cstdint>
#include <random>
#include <vector>

#include "mfit/manifold.hpp"

namespace mfit {

// Draw from N(0, sigma^2 I_n).
Vec gaussian_noise(int n, double sigma, std::mt19937_64& rng);
Vec gaussian_noise(int n, double sigma, std::uint64_t seed);

struct NoisyDataset {
  std::vector<Vec> clean;
  std::vector<Vec> noise;
  std::vector<Vec> observed;  // observed[i] = clean[i] + noise[i]
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

// Clean points and noise use independent streams split from `seed`.
// sigma = 0 is allowed and gives observed == clean.
NoisyDataset generate_observations(const AnalyticManifold& m, int count, double sigma,
                                   std::uint64_t seed);

// floor(C (n s^2 + s^2 log(C n s^2 / (eps delta))) sqrt(log(C / delta)) D / eps^2),
// s = sigma. Returned as a double because it can exceed 64-bit range.
double nd_sample_size(const GeometricBounds& bounds, double sigma, double eps,
                      double delta_prob, long long D, double C = 64.0);

struct PcaResult {
  Subspace subspace;    // top principal directions (linear part)
  Vec mean;             // affine offset; the fitted flat is mean + subspace
  double objective = 0.0;
  int sample_count = 0;
  bool capped = false;  // requested dimension was at least n
  bool padded = false;  // data rank below the requested dimension
};

// Affine PCA. Dimensions at or above n return the whole space.
PcaResult pca_fit(const std::vector<Vec>& points, long long D);

struct ProjectionReport {
  double sup_distance = 0.0;    // sup over sampled M of dist(x, S)
  double alpha_sq_tau = 0.0;
  double max_tangent_angle = 0.0;  // max |P_{S perp} v| over unit tangents
  double tangent_bound = 0.0;      // 3 alpha
  bool tangent_ok = false;
  bool exposed_ok = false;         // Pi_S(M) passes the 2R exposedness test
  double reach_estimate = 0.0;
  double reach_bound = 0.0;        // (1 - 4 alpha^2) tau
  bool reach_ok = false;

  bool passed() const { return tangent_ok && exposed_ok && reach_ok; }
};

// Numerical checks of the three projection checks for S through `offset`.
// Throws ContractError if sup dist(M, S) exceeds alpha^2 tau.
ProjectionReport verify_projection_bounds(const AnalyticManifold& m, const Subspace& s,
                                          const Vec& offset, double alpha,
                                          int sample_count = 600, std::uint64_t seed = 3);

}  // namespace mfit
