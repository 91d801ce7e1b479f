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

#include <span>
#include <utility>
#include <vector>

namespace mfit {

// Gauss-Legendre rule on [-1, 1] (Golub-Welsch), cached per order.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int order);

// Panels covering [lo, hi] whose widths double away from `center`,
// starting at `width`. center must lie in [lo, hi].
std::vector<std::pair<double, double>> graded_panels(double center, double lo, double hi,
                                                     double width);

// log(sum exp(v)); -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> v);

}  // namespace mfit
