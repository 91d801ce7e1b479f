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


#include "mfit/implicit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>

#include "mfit/errors.hpp"
#include "mfit/manifold.hpp"
#include "mfit/parallel.hpp"
#include "mfit/seeds.hpp"

namespace mfit {

Mat spectral_projector(const Mat& a, int rank, Vec* spectrum) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n || rank < 0 || rank > n) {
    throw ContractError("spectral_projector: bad shape or rank");
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(a);
  const Vec& ev = eig.eigenvalues();
  if (spectrum) *spectrum = ev;
  for (int k = 0; k < n; ++k) {
    const bool high = k >= n - rank;
    const double lo = high ? 0.5 : -0.5;
    if (!(ev(k) > lo && ev(k) < lo + 1.0)) {
      std::ostringstream msg;
      msg << "spectral gap: eigenvalue " << ev(k) << " at position " << k << " of " << n
          << " (expected " << rank << " in (1/2, 3/2), the rest in (-1/2, 1/2))";
      throw ContractError(msg.str());
    }
  }
  const Mat v = eig.eigenvectors().rightCols(rank);
  return v * v.transpose();
}

Mat contour_projector(const Mat& a, int nodes) {
  using Complex = std::complex<double>;
  using CMat = Eigen::MatrixXcd;
  if (nodes < 3) throw ContractError("contour_projector: need at least 3 nodes");
  const Eigen::Index n = a.rows();
  const CMat ac = a.cast<Complex>();
  const CMat eye = CMat::Identity(n, n);
  CMat sum = CMat::Zero(n, n);
  for (int k = 0; k < nodes; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / nodes;
    const Complex w = 0.5 * std::exp(Complex(0.0, theta));
    const Complex z = 1.0 + w;
    // dz / (2 pi i) = w dtheta / (2 pi).
    sum += w * (z * eye - ac).partialPivLu().inverse();
  }
  return (sum / static_cast<double>(nodes)).real();
}

std::vector<Vec> atlas_tube_samples(const DiscAtlas& atlas, int per_disc, std::uint64_t seed) {
  if (per_disc < 1) throw ContractError("atlas_tube_samples: per_disc must be positive");
  const int d = atlas.dim;
  const int n = atlas.ambient;
  std::vector<Vec> out;
  out.reserve(atlas.size() * per_disc);
  for (std::size_t i = 0; i < atlas.size(); ++i) {
    std::mt19937_64 rng(derive_seed(seed, Stage::Atlas, i));
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const Mat normal = Subspace::from_orthonormal(atlas.frames[i]).orthogonal_complement().basis();
    auto ball = [&](int k, double radius) {
      Vec g(k);
      for (int j = 0; j < k; ++j) g(j) = gauss(rng);
      const double len = g.norm();
      if (len == 0.0) return Vec(Vec::Zero(k));
      return Vec(g * (radius * std::pow(unif(rng), 1.0 / k) / len));
    };
    for (int s = 0; s < per_disc; ++s) {
      const Vec u = ball(d, atlas.radius / 2.0);
      const Vec w = ball(n - d, atlas.radius / (4.0 * d));
      out.push_back(atlas.centers[i] + atlas.frames[i] * u + normal * w);
    }
  }
  return out;
}

namespace {

double unit_bump(const DiscAtlas& atlas, std::size_t i, const Vec& x) {
  const double s = (x - atlas.centers[i]).squaredNorm() / (atlas.radius * atlas.radius);
  if (s >= 1.0) return 0.0;
  return std::pow(1.0 - s, atlas.dim + 2);
}

}  // namespace

std::vector<double> bump_weights_solve(const DiscAtlas& atlas, std::span<const Vec> tube,
                                       const WeightOptions& options, WeightReport* report) {
  if (!(options.c_lo > 0.0 && options.c_lo < 1.0)) {
    throw ContractError("bump_weights_solve: c_lo must lie in (0, 1)");
  }
  if (tube.empty()) throw ContractError("bump_weights_solve: no tube samples");
  const std::size_t k = atlas.size();

  struct Term {
    std::size_t disc;
    double value;
  };
  std::vector<std::vector<Term>> terms(tube.size());
  for (std::size_t s = 0; s < tube.size(); ++s) {
    for (std::size_t i = 0; i < k; ++i) {
      const double b = unit_bump(atlas, i, tube[s]);
      if (b > 0.0) terms[s].push_back({i, b});
    }
    if (terms[s].empty()) {
      std::ostringstream msg;
      msg << "bump_weights_solve: tube sample " << s << " lies outside every disc support";
      throw ContractError(msg.str());
    }
  }
  long long overlaps = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if ((atlas.centers[i] - atlas.centers[j]).norm() < 2.0 * atlas.radius) ++overlaps;
    }
  }

  WeightReport rep;
  const long long net = options.net_size > 0 ? options.net_size : static_cast<long long>(k);
  rep.operation_budget =
      static_cast<double>(net) * std::pow(options.C_w * atlas.dim, 2.0 * atlas.dim);

  std::vector<double> c(k, 1.0);
  std::vector<double> alpha(tube.size());
  std::vector<std::size_t> dominant(tube.size());
  const double hi = 1.0 / options.c_lo;
  for (int iter = 0;; ++iter) {
    rep.min_alpha = kInf;
    rep.max_alpha = 0.0;
    for (std::size_t s = 0; s < tube.size(); ++s) {
      double sum = 0.0;
      double best = -1.0;
      for (const Term& t : terms[s]) {
        const double v = c[t.disc] * t.value;
        sum += v;
        if (v > best) {
          best = v;
          dominant[s] = t.disc;
        }
      }
      alpha[s] = sum;
      rep.min_alpha = std::min(rep.min_alpha, sum);
      rep.max_alpha = std::max(rep.max_alpha, sum);
    }
    rep.iterations = iter;
    if (rep.min_alpha > options.c_lo && rep.max_alpha < hi) break;
    if (iter >= options.max_iterations) {
      std::vector<std::size_t> order(tube.size());
      for (std::size_t s = 0; s < order.size(); ++s) order[s] = s;
      auto badness = [&](std::size_t s) { return std::abs(std::log(alpha[s])); };
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return badness(a) > badness(b); });
      std::ostringstream msg;
      msg << "bump_weights_solve: iteration cap " << options.max_iterations
          << " reached with band violations; worst samples:";
      for (std::size_t j = 0; j < std::min<std::size_t>(5, order.size()); ++j) {
        msg << " #" << order[j] << " (" << alpha[order[j]] << ")";
      }
      throw ContractError(msg.str());
    }
    std::vector<double> log_sum(k, 0.0);
    std::vector<int> count(k, 0);
    for (std::size_t s = 0; s < tube.size(); ++s) {
      if (alpha[s] > options.c_lo && alpha[s] < hi) continue;
      log_sum[dominant[s]] -= std::log(alpha[s]);
      ++count[dominant[s]];
    }
    for (std::size_t i = 0; i < k; ++i) {
      if (count[i] > 0) c[i] *= std::exp(log_sum[i] / count[i]);
    }
    rep.update_operations += overlaps;
  }
  rep.within_budget = static_cast<double>(rep.update_operations) <= rep.operation_budget;
  if (report) *report = rep;
  return c;
}

ImplicitManifold::ImplicitManifold(DiscAtlas atlas, std::vector<double> weights,
                                   GeometricBounds bounds)
    : atlas_(std::move(atlas)), weights_(std::move(weights)), bounds_(bounds) {
  if (weights_.size() != atlas_.size()) {
    throw ContractError("ImplicitManifold: one weight per disc required");
  }
  for (double c : weights_) {
    if (!(c > 0.0) || !std::isfinite(c)) throw ContractError("ImplicitManifold: weights must be positive");
  }
  if (atlas_.normal_proj.size() != atlas_.size()) atlas_.finalize();
}

double ImplicitManifold::bump(std::size_t i, const Vec& x) const {
  return weights_.at(i) * unit_bump(atlas_, i, x);
}

double ImplicitManifold::alpha_tilde(const Vec& x) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < atlas_.size(); ++i) sum += bump(i, x);
  return sum;
}

std::vector<std::pair<std::size_t, double>> ImplicitManifold::partition(const Vec& x) const {
  if (x.size() != atlas_.ambient) throw ContractError("ImplicitManifold: dimension mismatch");
  std::vector<std::pair<std::size_t, double>> out;
  double sum = 0.0;
  for (std::size_t i = 0; i < atlas_.size(); ++i) {
    const double b = bump(i, x);
    if (b > 0.0) {
      out.emplace_back(i, b);
      sum += b;
    }
  }
  for (auto& [i, a] : out) a /= sum;
  return out;
}

namespace {

[[noreturn]] void outside_supports() {
  throw ContractError("ImplicitManifold: point lies outside every disc support");
}

}  // namespace

Vec ImplicitManifold::field(const Vec& x) const {
  const auto parts = partition(x);
  if (parts.empty()) outside_supports();
  Vec f = Vec::Zero(atlas_.ambient);
  for (const auto& [i, a] : parts) f += a * (atlas_.normal_proj[i] * (x - atlas_.centers[i]));
  return f;
}

Mat ImplicitManifold::averaged_projector(const Vec& x) const {
  const auto parts = partition(x);
  if (parts.empty()) outside_supports();
  Mat a = Mat::Zero(atlas_.ambient, atlas_.ambient);
  for (const auto& [i, w] : parts) a += w * atlas_.normal_proj[i];
  return a;
}

FrecValue ImplicitManifold::evaluate(const Vec& x) const {
  const auto parts = partition(x);
  if (parts.empty()) outside_supports();
  FrecValue out;
  Mat a = Mat::Zero(atlas_.ambient, atlas_.ambient);
  out.field = Vec::Zero(atlas_.ambient);
  for (const auto& [i, w] : parts) {
    a += w * atlas_.normal_proj[i];
    out.field += w * (atlas_.normal_proj[i] * (x - atlas_.centers[i]));
    out.alpha_tilde += bump(i, x);
  }
  out.projector = spectral_projector(a, atlas_.ambient - atlas_.dim, &out.spectrum);
  out.value = out.projector * out.field;
  return out;
}

FrecValue evaluate_Frec(const ImplicitManifold& im, const Vec& x) { return im.evaluate(x); }

ProjectionResult project_to_Mrec(const ImplicitManifold& im, const Vec& x0, double tol,
                                 int max_iterations) {
  ProjectionResult out;
  out.point = x0;
  Vec step = im.evaluate(x0).value;
  out.residual = step.norm();
  while (out.residual >= tol) {
    if (out.iterations >= max_iterations) {
      std::ostringstream msg;
      msg << "project_to_Mrec: no convergence after " << max_iterations
          << " iterations, residual " << out.residual;
      throw ContractError(msg.str());
    }
    ++out.iterations;
    double lambda = 1.0;
    bool moved = false;
    for (int halving = 0; halving < 40 && !moved; ++halving, lambda *= 0.5) {
      const Vec trial = out.point - lambda * step;
      try {
        Vec next = im.evaluate(trial).value;
        const double r = next.norm();
        if (r < out.residual) {
          out.point = trial;
          out.residual = r;
          step = std::move(next);
          moved = true;
        }
      } catch (const ContractError&) {
        // Left the supports or lost the spectral gap; shorten the step.
      }
    }
    if (!moved) {
      std::ostringstream msg;
      msg << "project_to_Mrec: step halving stalled, residual " << out.residual;
      throw ContractError(msg.str());
    }
  }
  return out;
}

Subspace zero_set_tangent(const ImplicitManifold& im, const Vec& x) {
  const int n = im.ambient_dim();
  const double h = 1e-5 * im.atlas().radius;
  Mat jac(n, n);
  for (int k = 0; k < n; ++k) {
    Vec e = Vec::Zero(n);
    e(k) = h;
    jac.col(k) = (im.evaluate(x + e).value - im.evaluate(x - e).value) / (2.0 * h);
  }
  Eigen::JacobiSVD<Mat> svd(jac, Eigen::ComputeFullV);
  return Subspace::span_of(svd.matrixV().rightCols(im.dim()));
}

ReconstructionMetrics evaluate_reconstruction(const ImplicitManifold& im,
                                              const AnalyticManifold& m,
                                              const ReconstructionOptions& options) {
  if (m.ambient_dim() != im.ambient_dim() || m.dim() != im.dim()) {
    throw ContractError("evaluate_reconstruction: dimension mismatch");
  }
  if (options.seeds < 1) throw ContractError("evaluate_reconstruction: seeds must be positive");
  const std::vector<Vec> seeds = m.uniform_sample(options.seeds, derive_seed(options.seed, Stage::Evaluate));
  std::vector<Vec> points(seeds.size());
  std::vector<Subspace> tangents(seeds.size());
  std::vector<double> to_truth(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t k) {
    points[k] = project_to_Mrec(im, seeds[k]).point;
    tangents[k] = zero_set_tangent(im, points[k]);
    to_truth[k] = m.distance(points[k]);
  });

  ReconstructionMetrics out;
  out.samples = static_cast<int>(seeds.size());
  double offset_sum = 0.0;
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    const double off = (points[k] - seeds[k]).norm();
    offset_sum += off;
    out.from_truth = std::max(out.from_truth, off);
    out.to_truth = std::max(out.to_truth, to_truth[k]);
  }
  out.mean_offset = offset_sum / static_cast<double>(seeds.size());
  out.hausdorff = std::max(out.from_truth, out.to_truth);
  out.reach = federer_reach_estimate(points, tangents);
  out.reach_target = options.reach_constant * m.bounds().tau / std::pow(m.dim(), 6);
  out.reach_ratio = out.reach / out.reach_target;
  out.points = std::move(points);
  return out;
}

}  // namespace mfit
