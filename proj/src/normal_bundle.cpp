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

#include "mfit/normal_bundle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "mfit/errors.hpp"

namespace mfit {
namespace {

// Unit constraint normals of the normal cone at p, in normal coordinates.
Mat normal_constraints(std::span<const Vec> hull, const Vec& p, const Mat& normal_basis) {
  std::vector<Vec> rows;
  for (const Vec& x : hull) {
    const Vec a = normal_basis.transpose() * (x - p);
    const double len = a.norm();
    if (len > 1e-12) rows.push_back(a / len);
  }
  if (rows.empty()) throw ContractError("cone_volume_checks: insufficient hull samples");
  return columns_of(rows);
}

double depth_in(const Mat& a, const Vec& w) {
  if (a.cols() == 0) return w.norm();
  return std::min(-(a.transpose() * w).maxCoeff(), w.norm());
}

// Largest ball inside {w : <a_i, w> <= 0, |w| <= 1}: maximize the concave
// function min(-<a_i, c>, 1 - |c|) by compass search.
double inscribed_radius(const Mat& a) {
  const int k = static_cast<int>(a.rows());
  auto radius = [&](const Vec& c) {
    return std::min(-(a.transpose() * c).maxCoeff(), 1.0 - c.norm());
  };
  Vec c = -a.rowwise().mean();
  if (c.norm() < 1e-12) return 0.0;
  c = 0.5 * c / c.norm();
  double best = radius(c);
  double step = 0.25;
  while (step > 1e-12) {
    bool improved = false;
    for (int i = 0; i < k; ++i) {
      for (double sign : {1.0, -1.0}) {
        Vec trial = c;
        trial(i) += sign * step;
        const double r = radius(trial);
        if (r > best) {
          best = r;
          c = trial;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return std::max(best, 0.0);
}

Vec uniform_in_ball(int k, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vec g(k);
  for (int i = 0; i < k; ++i) g(i) = gauss(rng);
  return std::pow(unif(rng), 1.0 / k) * g / g.norm();
}

}  // namespace

double normal_cone_depth(const AnalyticManifold& m, std::span<const Vec> hull, const Vec& p,
                         const Vec& v) {
  const Mat nb = m.normal_space(p).basis();
  return depth_in(normal_constraints(hull, p, nb), nb.transpose() * v);
}

ConeVolumeReport cone_volume_checks(const AnalyticManifold& m, const ConeVolumeOptions& options) {
  const GeometricBounds& b = m.bounds();
  const int big_d = m.ambient_dim();
  const int d = m.dim();
  if (big_d > 6) throw ContractError("cone_volume_checks: ambient dimension above 6");
  if (options.points < 2 || options.mc_samples < 1) {
    throw ContractError("cone_volume_checks: insufficient samples");
  }
  const std::vector<Vec> hull = m.grid_points(d == 1 ? options.hull_per_dim
                                                     : static_cast<int>(std::sqrt(options.hull_per_dim)));
  const int k = big_d - d;
  const double ball = omega_d(k);

  ConeVolumeReport out;
  out.points = options.points;
  out.integral_bound = std::pow(b.tau, d) * omega_d(big_d);
  out.thick_bound = b.tau / (b.tau + b.R);
  out.deep_bound = std::pow(2.0, -2.0 * big_d) * std::pow(b.tau / b.R, big_d + d);
  const double r0 = 0.5 * out.thick_bound;

  std::mt19937_64 rng(options.seed);
  const std::vector<Vec> base = m.uniform_sample(options.points, rng());
  std::vector<double> vols;
  out.min_thick_radius = kInf;
  for (const Vec& p : base) {
    const Mat nb = m.normal_space(p).basis();
    const Mat a = normal_constraints(hull, p, nb);
    int inside = 0;
    for (int s = 0; s < options.mc_samples; ++s) {
      const Vec w = uniform_in_ball(k, rng);
      if ((a.transpose() * w).maxCoeff() <= 0.0) ++inside;
    }
    vols.push_back(ball * inside / options.mc_samples);
    out.min_thick_radius = std::min(out.min_thick_radius, inscribed_radius(a));
  }
  double mean = 0.0;
  for (double v : vols) mean += v;
  mean /= static_cast<double>(vols.size());
  double var = 0.0;
  for (double v : vols) var += (v - mean) * (v - mean);
  var /= static_cast<double>(vols.size() - 1);
  // Binomial floor so a constant slice volume still carries its MC error.
  const double binom = ball * ball * 0.25 / options.mc_samples;
  out.integral = m.volume() * mean;
  out.integral_sigma = m.volume() * std::sqrt(std::max(var, binom) / static_cast<double>(vols.size()));

  std::normal_distribution<double> gauss;
  int deep = 0;
  for (int s = 0; s < options.points; ++s) {
    Vec v(big_d);
    for (int i = 0; i < big_d; ++i) v(i) = gauss(rng);
    v.normalize();
    const Vec x = m.support_point(v);
    if (normal_cone_depth(m, hull, x, v) >= r0) ++deep;
  }
  out.deep_fraction = static_cast<double>(deep) / options.points;
  out.deep_sigma = std::sqrt(std::max(out.deep_fraction * (1.0 - out.deep_fraction), 1.0 / options.points) /
                             options.points);

  auto flag = [&](const std::string& what, double value, double bound) {
    std::ostringstream msg;
    msg << what << ": " << value << " below " << bound;
    out.violations.push_back(msg.str());
  };
  if (out.integral < out.integral_bound - 3.0 * out.integral_sigma) {
    flag("normal-bundle volume", out.integral, out.integral_bound);
  }
  if (out.deep_fraction < out.deep_bound - 3.0 * out.deep_sigma) {
    flag("deep-interior probability", out.deep_fraction, out.deep_bound);
  }
  if (out.min_thick_radius < out.thick_bound - 1e-9) {
    flag("inscribed radius", out.min_thick_radius, out.thick_bound);
  }
  return out;
}

}  // namespace mfit
