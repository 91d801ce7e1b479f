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

#include <cmath>
#include <numbers>

#include "mfit/errors.hpp"
#include "mfit/manifold.hpp"

namespace mfit {

double omega_d(int d) {
  if (d < 0) throw ContractError("omega_d: dimension must be nonnegative");
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

BetaResult beta_and_D(double alpha, const GeometricBounds& bounds) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ContractError("beta_and_D: alpha must lie in (0, 1)");
  const double a2t = alpha * alpha * bounds.tau;
  const double w = omega_d(bounds.d);
  BetaResult out;
  out.beta = std::sqrt(0.1 * std::pow(a2t / 2.0, 2) * std::pow(a2t / 4.0, bounds.d) * (w / bounds.V));
  const double count = std::floor(bounds.V / (w * std::pow(out.beta, bounds.d))) + 1.0;
  if (!(count < 9.0e18)) throw ContractError("beta_and_D: dimension bound overflows");
  out.D = static_cast<long long>(count);
  out.eps_max = 0.5 * out.beta * out.beta;
  return out;
}

}  // namespace mfit
