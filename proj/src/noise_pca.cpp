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

#include "mfit/noise_pca.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mfit/errors.hpp"
#include "mfit/seeds.hpp"

namespace mfit {

Vec gaussian_noise(int n, double sigma, std::mt19937_64& rng) {
  if (!(sigma > 0.0)) throw ContractError("gaussian_noise: sigma must be positive");
  std::normal_distribution<double> gauss(0.0, sigma);
  Vec out(n);
  for (int i = 0; i < n; ++i) out(i) = gauss(rng);
  return out;
}

Vec gaussian_noise(int n, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return gaussian_noise(n, sigma, rng);
}

NoisyDataset generate_observations(const AnalyticManifold& m, int count, double sigma,
                                   std::uint64_t seed) {
  if (count < 1) throw ContractError("generate_observations: count must be at least 1");
  if (sigma < 0.0) throw ContractError("generate_observations: sigma must be nonnegative");
  NoisyDataset out;
  out.sigma = sigma;
  out.seed = seed;
  out.clean = m.uniform_sample(count, derive_seed(seed, Stage::Generate));
  std::mt19937_64 rng(derive_seed(seed, Stage::Noise));
  const int n = m.ambient_dim();
  out.noise.reserve(out.clean.size());
  out.observed.reserve(out.clean.size());
  for (const Vec& x : out.clean) {
    Vec z = sigma > 0.0 ? gaussian_noise(n, sigma, rng) : Vec(Vec::Zero(n));
    out.observed.push_back(x + z);
    out.noise.push_back(std::move(z));
  }
  return out;
}

double nd_sample_size(const GeometricBounds& bounds, double sigma, double eps,
                      double delta_prob, long long D, double C) {
  if (!(sigma > 0.0 && eps > 0.0 && delta_prob > 0.0 && D > 0 && C > 0.0)) {
    throw ContractError("nd_sample_size: all inputs must be positive");
  }
  const double n = bounds.n;
  const double s2 = sigma * sigma;
  const double lead = C * (n * s2 + s2 * std::log(C * n * s2 / (eps * delta_prob)));
  return std::floor(lead * std::sqrt(std::log(C / delta_prob)) * static_cast<double>(D) / (eps * eps));
}

PcaResult pca_fit(const std::vector<Vec>& points, long long D) {
  if (points.empty()) throw ContractError("pca_fit: no points");
  const int n = static_cast<int>(points.front().size());
  if (D < 1) throw ContractError("pca_fit: dimension must be positive");
  if (static_cast<long long>(points.size()) < std::min<long long>(D, n) + 1) {
    throw ContractError("pca_fit: need at least D+1 points");
  }
  PcaResult out;
  out.sample_count = static_cast<int>(points.size());
  out.mean = Vec::Zero(n);
  for (const Vec& y : points) out.mean += y;
  out.mean /= static_cast<double>(points.size());
  if (D >= n) {
    out.capped = true;
    out.subspace = Subspace::from_orthonormal(Mat::Identity(n, n));
    out.objective = 0.0;
    return out;
  }
  Mat cov = Mat::Zero(n, n);
  for (const Vec& y : points) {
    const Vec c = y - out.mean;
    cov.selfadjointView<Eigen::Lower>().rankUpdate(c);
  }
  cov = cov.selfadjointView<Eigen::Lower>();
  Eigen::SelfAdjointEigenSolver<Mat> eig(cov);
  const int k = static_cast<int>(D);
  // Eigenvalues are ascending; take the last k columns, largest first.
  Mat basis(n, k);
  for (int i = 0; i < k; ++i) basis.col(i) = eig.eigenvectors().col(n - 1 - i);
  const double top = std::max(eig.eigenvalues()(n - 1), 0.0);
  out.padded = eig.eigenvalues()(n - k) <= 1e-12 * std::max(top, 1e-300);
  out.subspace = Subspace::from_orthonormal(basis);
  double obj = 0.0;
  for (const Vec& y : points) obj += out.subspace.reject(y - out.mean).squaredNorm();
  out.objective = obj;
  return out;
}

ProjectionReport verify_projection_bounds(const AnalyticManifold& m, const Subspace& s,
                                          const Vec& offset, double alpha, int sample_count,
                                          std::uint64_t seed) {
  if (s.ambient_dim() != m.ambient_dim()) {
    throw ContractError("verify_projection_bounds: dimension mismatch");
  }
  const Vec mu = offset.size() == 0 ? Vec(Vec::Zero(m.ambient_dim())) : offset;
  const GeometricBounds& b = m.bounds();
  ProjectionReport out;
  out.alpha_sq_tau = alpha * alpha * b.tau;
  out.tangent_bound = 3.0 * alpha;
  out.reach_bound = (1.0 - 4.0 * alpha * alpha) * b.tau;

  std::vector<Vec> pts = m.uniform_sample(sample_count, seed);
  for (const Vec& g : m.grid_points(m.dim() == 1 ? 256 : 16)) pts.push_back(g);
  for (const Vec& x : pts) out.sup_distance = std::max(out.sup_distance, s.distance(x - mu));
  if (out.sup_distance > out.alpha_sq_tau * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "verify_projection_bounds: hypothesis sup dist(M, S) <= alpha^2 tau fails ("
        << out.sup_distance << " > " << out.alpha_sq_tau << ")";
    throw ContractError(msg.str());
  }

  std::vector<Vec> image;
  std::vector<Subspace> image_tangents;
  std::mt19937_64 rng(seed + 1);
  std::normal_distribution<double> gauss;
  for (const Vec& x : pts) {
    const Subspace t = m.tangent(x);
    for (int i = 0; i < t.dim(); ++i) {
      out.max_tangent_angle = std::max(out.max_tangent_angle, s.distance(t.basis().col(i)));
    }
    Vec c(t.dim());
    for (int i = 0; i < t.dim(); ++i) c(i) = gauss(rng);
    out.max_tangent_angle = std::max(out.max_tangent_angle, s.distance(t.basis() * c / c.norm()));
    image.push_back(mu + s.project(x - mu));
    image_tangents.push_back(Subspace::span_of(s.projector() * t.basis(), 1e-10));
  }
  out.tangent_ok = out.max_tangent_angle <= out.tangent_bound;

  // Exposedness of the image with radius 2R; nu points from p toward the
  // image centroid, restricted to the normal space of the image at p.
  Vec centroid = Vec::Zero(m.ambient_dim());
  for (const Vec& p : image) centroid += p;
  centroid /= static_cast<double>(image.size());
  out.exposed_ok = std::isfinite(b.R);
  for (std::size_t i = 0; i < image.size() && out.exposed_ok; ++i) {
    Vec nu = s.project(image_tangents[i].reject(centroid - image[i]));
    if (nu.norm() < 1e-12) {
      out.exposed_ok = false;
      break;
    }
    nu.normalize();
    out.exposed_ok = check_exposedness(image[i], nu, image, 2.0 * b.R);
  }

  out.reach_estimate = federer_reach_estimate(image, image_tangents);
  out.reach_ok = out.reach_estimate >= out.reach_bound;
  return out;
}

}  // namespace mfit
