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

#include "mfit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfit/errors.hpp"

namespace mfit {

Subspace Subspace::span_of(const Mat& vectors, double rank_tol) {
  if (vectors.rows() == 0 || vectors.cols() == 0) {
    throw ContractError("subspace: no spanning vectors");
  }
  Eigen::ColPivHouseholderQR<Mat> qr(vectors);
  qr.setThreshold(rank_tol);
  const int rank = static_cast<int>(qr.rank());
  if (rank == 0) throw ContractError("subspace: spanning vectors are all zero");
  Mat q = qr.householderQ() * Mat::Identity(vectors.rows(), rank);
  return Subspace(std::move(q));
}

Subspace Subspace::from_orthonormal(Mat basis) {
  const int k = static_cast<int>(basis.cols());
  if (k == 0 || basis.rows() < k) {
    throw ContractError("subspace: need 0 < k <= n basis vectors");
  }
  const double err =
      (basis.transpose() * basis - Mat::Identity(k, k)).cwiseAbs().maxCoeff();
  if (err > 1e-10) {
    throw ContractError("subspace: basis not orthonormal (error " +
                        std::to_string(err) + ")");
  }
  return Subspace(std::move(basis));
}

Subspace Subspace::orthogonal_complement() const {
  const int n = ambient_dim();
  const int k = dim();
  if (k == n) throw ContractError("subspace: complement of the full space is zero");
  Eigen::HouseholderQR<Mat> qr(basis_);
  Mat full = qr.householderQ() * Mat::Identity(n, n);
  return Subspace(full.rightCols(n - k));
}

double subspace_distance(const Subspace& x, const Subspace& y) {
  if (x.ambient_dim() != y.ambient_dim() || x.dim() != y.dim()) {
    throw ContractError("subspace_distance: dimension mismatch");
  }
  return std::clamp(operator_norm(x.projector() - y.projector()), 0.0, 1.0);
}

double operator_norm(const Mat& a) {
  if (a.size() == 0) return 0.0;
  if (a.cols() <= 50 && a.rows() <= 50) {
    Eigen::JacobiSVD<Mat> svd(a);
    return svd.singularValues()(0);
  }
  const Mat gram = a.transpose() * a;
  Vec v = Vec::Ones(gram.cols()) / std::sqrt(static_cast<double>(gram.cols()));
  double lambda = 0.0;
  for (int it = 0; it < 1000; ++it) {
    Vec w = gram * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    w /= norm;
    const double next = w.dot(gram * w);
    v = w;
    if (std::abs(next - lambda) <= 1e-14 * std::max(1.0, next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(std::max(lambda, 0.0));
}

void GeometricBounds::validate() const {
  if (!(tau > 0.0)) throw ContractError("bounds: tau must be positive");
  if (!(V > 0.0)) throw ContractError("bounds: V must be positive");
  if (!(Lambda >= 1.0 / (tau * tau) * (1.0 - 1e-12))) {
    throw ContractError("bounds: Lambda must be at least tau^-2");
  }
  if (!(R >= tau * (1.0 - 1e-12))) throw ContractError("bounds: R must be at least tau");
  if (d < 1 || d >= n) throw ContractError("bounds: need 1 <= d < n");
}

GeometricBounds GeometricBounds::scaled(double s) const {
  GeometricBounds out = *this;
  out.tau *= s;
  out.V *= std::pow(s, d);
  out.R *= s;
  out.Lambda /= s * s;
  return out;
}

Mat columns_of(std::span<const Vec> points) {
  if (points.empty()) return Mat();
  Mat out(points.front().size(), static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != out.rows()) {
      throw ContractError("point list has inconsistent dimensions");
    }
    out.col(static_cast<Eigen::Index>(i)) = points[i];
  }
  return out;
}

double federer_reach_estimate(std::span<const Vec> points,
                              std::span<const Subspace> tangents) {
  if (points.size() < 2) throw ContractError("federer_reach_estimate: need >= 2 points");
  if (tangents.size() != points.size()) {
    throw ContractError("federer_reach_estimate: one tangent space per point required");
  }
  const Mat x = columns_of(points);
  const Eigen::Index count = x.cols();
  // Pairs closer than this carry rounding noise comparable to their normal
  // offset (which is quadratic in the separation), so they are skipped.
  const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
  const double min_len2 = 1e-10 * scale * scale;
  double sup = 0.0;
  for (Eigen::Index i = 0; i < count; ++i) {
    const Subspace& t = tangents[static_cast<std::size_t>(i)];
    if (t.ambient_dim() != x.rows()) {
      throw ContractError("federer_reach_estimate: tangent dimension mismatch");
    }
    const Mat diff = x.colwise() - x.col(i);
    const Eigen::RowVectorXd len2 = diff.colwise().squaredNorm();
    const Eigen::RowVectorXd along = (t.basis().transpose() * diff).colwise().squaredNorm();
    for (Eigen::Index j = 0; j < count; ++j) {
      if (j == i || len2(j) < min_len2) continue;
      const double normal2 = std::max(len2(j) - along(j), 0.0);
      // Recompute small residuals directly to avoid cancellation.
      double normal = std::sqrt(normal2);
      if (normal2 < 1e-4 * len2(j)) normal = t.reject(diff.col(j)).norm();
      sup = std::max(sup, 2.0 * normal / len2(j));
    }
  }
  return sup == 0.0 ? kInf : 1.0 / sup;
}

bool check_reach_inequality(const Vec& p, const Vec& q, const Subspace& tangent,
                            double tau) {
  const Vec r = q - p;
  const double len2 = r.squaredNorm();
  if (len2 == 0.0) throw ContractError("check_reach_inequality: p equals q");
  const double lhs = tangent.reject(r).norm();
  const double rhs = len2 / (2.0 * tau);
  return lhs <= rhs + 1e-12 * std::max(1.0, rhs);
}

bool check_exposedness(const Vec& p, const Vec& nu, std::span<const Vec> samples,
                       double R) {
  if (std::abs(nu.norm() - 1.0) > 1e-10) {
    throw ContractError("check_exposedness: nu_p must be a unit vector");
  }
  for (const Vec& q : samples) {
    const Vec r = q - p;
    const double lhs = r.dot(nu);
    const double rhs = r.squaredNorm() / (2.0 * R);
    if (lhs < rhs - 1e-12 * std::max(1.0, rhs)) return false;
  }
  return true;
}

double directed_hausdorff(std::span<const Vec> from, std::span<const Vec> to) {
  if (from.empty() || to.empty()) throw ContractError("hausdorff_distance: empty input");
  const Mat b = columns_of(to);
  const Eigen::RowVectorXd bsq = b.colwise().squaredNorm();
  double worst = 0.0;
  for (const Vec& a : from) {
    if (a.size() != b.rows()) throw ContractError("hausdorff_distance: dimension mismatch");
    const Eigen::RowVectorXd d2 =
        (bsq.array() - 2.0 * (a.transpose() * b).array() + a.squaredNorm()).matrix();
    Eigen::Index k = 0;
    d2.minCoeff(&k);
    worst = std::max(worst, (b.col(k) - a).norm());
  }
  return worst;
}

double hausdorff_distance(std::span<const Vec> a, std::span<const Vec> b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

Vec SecondFundamentalForm::operator()(const Vec& xi, const Vec& eta) const {
  const int d = dim();
  const Vec a = tangent.basis().transpose() * xi;
  const Vec c = tangent.basis().transpose() * eta;
  Vec out = Vec::Zero(tangent.ambient_dim());
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) out += a(i) * c(j) * values[static_cast<std::size_t>(i * d + j)];
  }
  return out;
}

Mat shape_operator(const SecondFundamentalForm& form, const Vec& v, double normal_tol) {
  const int d = form.dim();
  if (static_cast<int>(form.values.size()) != d * d) {
    throw ContractError("shape_operator: second fundamental form table has wrong size");
  }
  const double tangential = (form.tangent.basis().transpose() * v).norm();
  if (tangential > normal_tol * std::max(1.0, v.norm())) {
    throw ContractError("shape_operator: v is not normal to the tangent space");
  }
  Mat l(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      l(j, i) = -form.values[static_cast<std::size_t>(i * d + j)].dot(v);
    }
  }
  return l;
}

}  // namespace mfit
