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

#include <algorithm>
#include <cmath>

#include "mfit/errors.hpp"
#include "mfit/manifold.hpp"

namespace mfit {

LocalGraph::LocalGraph(const AnalyticManifold& m, const Vec& p) : manifold_(m), base_(p) {
  m.require_on_manifold(p);
  base_ = m.closest_point(p);
  tangent_ = m.tangent(base_);
  normal_ = tangent_.orthogonal_complement();
  tau_ = m.bounds().tau;
  radius_ = std::min(tau_, 1.0) / 8.0;
}

Vec LocalGraph::lift(const Vec& x) const {
  const Mat& t = tangent_.basis();
  Vec q = manifold_.closest_point(base_ + t * x);
  for (int it = 0; it < 80; ++it) {
    const Vec err = x - t.transpose() * (q - base_);
    if (err.norm() < 1e-15) break;
    q = manifold_.closest_point(q + t * err);
  }
  return q;
}

Vec LocalGraph::value(const Vec& x) const {
  if (x.size() != tangent_.dim()) throw ContractError("local graph: argument has the wrong dimension");
  return normal_.basis().transpose() * (lift(x) - base_);
}

Mat LocalGraph::differential(const Vec& x) const {
  const int d = tangent_.dim();
  const double h = 1e-5 * radius_;
  Mat out(normal_.dim(), d);
  for (int i = 0; i < d; ++i) {
    Vec e = Vec::Zero(d);
    e(i) = h;
    out.col(i) = (value(x + e) - value(x - e)) / (2.0 * h);
  }
  return out;
}

double LocalGraph::second_differential_norm(const Vec& x) const {
  const int d = tangent_.dim();
  const double h = 1e-3 * radius_;
  double best = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      Vec ei = Vec::Zero(d);
      Vec ej = Vec::Zero(d);
      ei(i) = h;
      ej(j) = h;
      const Vec v = (value(x + ei + ej) - value(x + ei - ej) - value(x - ei + ej) +
                     value(x - ei - ej)) /
                    (4.0 * h * h);
      best = std::max(best, v.norm());
    }
  }
  return best;
}

LocalGraph::BoundReport LocalGraph::check_bounds(int per_dim) const {
  const int d = tangent_.dim();
  BoundReport out;
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  const double scale = std::isfinite(tau_) ? tau_ : 1.0;
  while (true) {
    Vec x(d);
    for (int i = 0; i < d; ++i) {
      x(i) = -radius_ + 2.0 * radius_ * idx[static_cast<std::size_t>(i)] / std::max(1, per_dim - 1);
    }
    const double len = x.norm();
    if (len > 1e-12 && len <= radius_ * (1.0 - 1e-9)) {
      const double f = value(x).norm();
      const double slope = operator_norm(differential(x));
      const double curv = second_differential_norm(x);
      if (std::isfinite(tau_)) {
        out.max_value_ratio = std::max(out.max_value_ratio, f * scale / (len * len));
        out.max_slope_ratio = std::max(out.max_slope_ratio, slope * scale / len);
        out.max_second_norm = std::max(out.max_second_norm, curv * scale);
      } else {
        out.max_value_ratio = std::max(out.max_value_ratio, f);
        out.max_slope_ratio = std::max(out.max_slope_ratio, slope);
        out.max_second_norm = std::max(out.max_second_norm, curv);
      }
      ++out.points;
    }
    int k = 0;
    while (k < d && ++idx[static_cast<std::size_t>(k)] == per_dim) idx[static_cast<std::size_t>(k++)] = 0;
    if (k == d) break;
  }
  return out;
}

}  // namespace mfit
