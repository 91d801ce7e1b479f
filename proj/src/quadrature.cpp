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

#include "mfit/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "mfit/errors.hpp"

namespace mfit {

const GaussRule& gauss_legendre(int order) {
  if (order < 1) throw ContractError("gauss_legendre: order must be positive");
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;

  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double beta = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = beta;
    jacobi(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  GaussRule rule;
  for (int k = 0; k < order; ++k) {
    rule.nodes.push_back(eig.eigenvalues()(k));
    const double v0 = eig.eigenvectors()(0, k);
    rule.weights.push_back(2.0 * v0 * v0);
  }
  return cache.emplace(order, std::move(rule)).first->second;
}

std::vector<std::pair<double, double>> graded_panels(double center, double lo, double hi,
                                                     double width) {
  if (!(lo <= center && center <= hi)) {
    throw ContractError("graded_panels: center outside the interval");
  }
  if (!(width > 0.0)) width = hi - lo;
  std::vector<std::pair<double, double>> left;
  std::vector<std::pair<double, double>> out;
  double a = center;
  double w = width;
  while (a > lo) {
    const double b = std::max(lo, a - w);
    left.emplace_back(b, a);
    a = b;
    w *= 2.0;
  }
  out.assign(left.rbegin(), left.rend());
  a = center;
  w = width;
  while (a < hi) {
    const double b = std::min(hi, a + w);
    out.emplace_back(a, b);
    a = b;
    w *= 2.0;
  }
  return out;
}

double log_sum_exp(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace mfit
