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
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mfit/atlas.hpp"
#include "mfit/geometry.hpp"

namespace mfit {

class AnalyticManifold;

// Projection onto the eigenvectors of the top `rank` eigenvalues of a
// symmetric matrix. Throws "spectral gap" unless `rank` eigenvalues lie in
// (1/2, 3/2) and the rest in (-1/2, 1/2).
Mat spectral_projector(const Mat& a, int rank, Vec* spectrum = nullptr);

// (1 / 2 pi i) times the contour integral of (zI - A)^{-1} over the circle
// |z - 1| = 1/2, trapezoid rule with `nodes` points. Test oracle only.
Mat contour_projector(const Mat& a, int nodes = 256);

struct WeightOptions {
  double c_lo = 0.1;
  int max_iterations = 1000;
  double C_w = 8.0;         // operation budget |net| (C_w d)^{2d}
  long long net_size = 0;   // 0: use the atlas size
};

struct WeightReport {
  int iterations = 0;
  double min_alpha = 0.0;
  double max_alpha = 0.0;
  long long update_operations = 0;  // overlapping disc pairs touched per sweep
  double operation_budget = 0.0;
  bool within_budget = true;
};

// Points p_i + T u + N w with |u| <= r/2 and |w| <= r/(4d), drawn per disc
// from derive_seed(seed, Atlas, i).
std::vector<Vec> atlas_tube_samples(const DiscAtlas& atlas, int per_disc, std::uint64_t seed);

// Iterative proportional fitting of the bump amplitudes c_i so that the
// unnormalized bump sum lies in (c_lo, 1/c_lo) on every tube sample.
std::vector<double> bump_weights_solve(const DiscAtlas& atlas, std::span<const Vec> tube,
                                       const WeightOptions& options = {},
                                       WeightReport* report = nullptr);

struct FrecValue {
  Vec value;          // F_rec(x) = Pi_x F(x)
  Vec field;          // F(x)
  Vec spectrum;       // eigenvalues of A_x, ascending
  Mat projector;      // Pi_x
  double alpha_tilde = 0.0;
};

// Zero set of F_rec over a disc atlas with bump amplitudes c_i. Bumps are
// c_i (1 - |x - p_i|^2 / r^2)^{d+2} on the open ball of radius r.
class ImplicitManifold {
 public:
  ImplicitManifold() = default;
  ImplicitManifold(DiscAtlas atlas, std::vector<double> weights, GeometricBounds bounds = {});

  const DiscAtlas& atlas() const { return atlas_; }
  const std::vector<double>& weights() const { return weights_; }
  const GeometricBounds& bounds() const { return bounds_; }
  int dim() const { return atlas_.dim; }
  int ambient_dim() const { return atlas_.ambient; }
  int exponent() const { return atlas_.dim + 2; }

  double bump(std::size_t i, const Vec& x) const;
  double alpha_tilde(const Vec& x) const;
  // (i, alpha_i(x)) over discs whose support contains x; empty outside.
  std::vector<std::pair<std::size_t, double>> partition(const Vec& x) const;
  Vec field(const Vec& x) const;
  Mat averaged_projector(const Vec& x) const;  // A_x

  // Throws outside every support or when A_x has no spectral gap.
  FrecValue evaluate(const Vec& x) const;

 private:
  DiscAtlas atlas_;
  std::vector<double> weights_;
  GeometricBounds bounds_;
};

FrecValue evaluate_Frec(const ImplicitManifold& im, const Vec& x);

struct ProjectionResult {
  Vec point;
  double residual = 0.0;
  int iterations = 0;
};

// x <- x - lambda F_rec(x), lambda = 1 halved whenever |F_rec| would grow.
ProjectionResult project_to_Mrec(const ImplicitManifold& im, const Vec& x0, double tol = 1e-9,
                                 int max_iterations = 200);

// Tangent space of the zero set at x: the d smallest right singular vectors
// of a central-difference Jacobian of F_rec.
Subspace zero_set_tangent(const ImplicitManifold& im, const Vec& x);

struct ReconstructionOptions {
  int seeds = 2000;
  std::uint64_t seed = 1;
  double reach_constant = 1.0;  // target reach_constant * tau / d^6
};

struct ReconstructionMetrics {
  int samples = 0;
  double hausdorff = 0.0;
  double to_truth = 0.0;    // max over M_rec samples of dist(y, M0)
  double from_truth = 0.0;  // max over seeds x of |x - proj(x)|, bounds dist(x, M_rec)
  double mean_offset = 0.0;
  double reach = 0.0;       // kInf for a flat reconstruction
  double reach_target = 0.0;
  double reach_ratio = 0.0;
  std::vector<Vec> points;
};

// Projects uniform samples of m onto M_rec and compares.
ReconstructionMetrics evaluate_reconstruction(const ImplicitManifold& im,
                                              const AnalyticManifold& m,
                                              const ReconstructionOptions& options = {});

// Versioned text form; field order is listed in README.md.
void write_implicit(std::ostream& out, const ImplicitManifold& im);
ImplicitManifold read_implicit(std::istream& in);
void save_implicit(const std::string& path, const ImplicitManifold& im);
ImplicitManifold load_implicit(const std::string& path);

}  // namespace mfit
