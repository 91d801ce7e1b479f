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

#include <Eigen/Dense>

#include <limits>
#include <span>
#include <vector>

namespace mfit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Linear subspace of R^n stored as an orthonormal column basis.
class Subspace {
 public:
  Subspace() = default;

  // Orthonormalizes the columns; directions below `rank_tol` are dropped.
  static Subspace span_of(const Mat& vectors, double rank_tol = 1e-12);
  // Takes ownership of an already orthonormal basis (checked to 1e-10).
  static Subspace from_orthonormal(Mat basis);

  int ambient_dim() const { return static_cast<int>(basis_.rows()); }
  int dim() const { return static_cast<int>(basis_.cols()); }
  const Mat& basis() const { return basis_; }

  Mat projector() const { return basis_ * basis_.transpose(); }
  Vec project(const Vec& x) const { return basis_ * (basis_.transpose() * x); }
  Vec reject(const Vec& x) const { return x - project(x); }
  double distance(const Vec& x) const { return reject(x).norm(); }
  Subspace orthogonal_complement() const;

 private:
  explicit Subspace(Mat basis) : basis_(std::move(basis)) {}
  Mat basis_;
};

// Operator norm of P_X - P_Y; lies in [0, 1].
double subspace_distance(const Subspace& x, const Subspace& y);

// Largest singular value. Exact SVD up to 50 columns, power iteration beyond.
double operator_norm(const Mat& a);

// Regularity assumptions on the unknown manifold.
struct GeometricBounds {
  int d = 1;
  int n = 2;
  double tau = 1.0;     // reach lower bound
  double V = 1.0;       // volume upper bound
  double R = 1.0;       // exposedness radius
  double Lambda = 1.0;  // Lipschitz constant of the second fundamental form

  // Throws ContractError unless tau > 0, Lambda >= tau^-2, R >= tau, d < n.
  void validate() const;
  // Copy with every length multiplied by `s`.
  GeometricBounds scaled(double s) const;
};

// Inverse of sup over ordered pairs of 2 |q-p|^-2 dist(q-p, T_p).
// Pairs closer than 1e-5 times the coordinate scale are ignored.
// Returns kInf when every pair lies in the tangent plane of the other.
double federer_reach_estimate(std::span<const Vec> points,
                              std::span<const Subspace> tangents);

// |P_{T_p perp}(q-p)| <= |q-p|^2 / (2 tau).
bool check_reach_inequality(const Vec& p, const Vec& q, const Subspace& tangent,
                            double tau);

// <q-p, nu> >= |q-p|^2 / (2R) for every sample q.
bool check_exposedness(const Vec& p, const Vec& nu, std::span<const Vec> samples,
                       double R);

double directed_hausdorff(std::span<const Vec> from, std::span<const Vec> to);
double hausdorff_distance(std::span<const Vec> a, std::span<const Vec> b);

// Second fundamental form at a point, tabulated on an orthonormal tangent
// basis: values[i * d + j] = II(e_i, e_j), a normal vector.
struct SecondFundamentalForm {
  Subspace tangent;
  std::vector<Vec> values;

  int dim() const { return tangent.dim(); }
  Vec operator()(const Vec& xi, const Vec& eta) const;
};

// Matrix of L_{p,v} in the tangent basis: <L e_i, e_j> = -<II(e_i, e_j), v>.
Mat shape_operator(const SecondFundamentalForm& form, const Vec& v,
                   double normal_tol = 1e-8);

// Packs a list of equal-length vectors as matrix columns.
Mat columns_of(std::span<const Vec> points);

}  // namespace mfit
