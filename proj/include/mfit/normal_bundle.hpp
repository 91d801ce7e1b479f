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
#include <string>
#include <vector>

#include "mfit/manifold.hpp"

namespace mfit {

// Monte-Carlo checks of the normal-bundle volume statements for the convex
// hull K of a manifold lying on the boundary of K. S_K(p) is the outer normal
// cone at p intersected with the unit ball; volumes are (D-d)-dimensional and
// measured inside the normal space at p.
struct ConeVolumeReport {
  double integral = 0.0;          // estimate of the integral of vol(S_K(p)) over M
  double integral_sigma = 0.0;
  double integral_bound = 0.0;    // tau^d * omega_D
  double deep_fraction = 0.0;     // P[dist(v, boundary of N_K(x_v)) >= r0], v uniform
  double deep_sigma = 0.0;
  double deep_bound = 0.0;        // 2^{-2D} (tau/R)^{D+d}
  double min_thick_radius = 0.0;  // smallest inscribed-ball radius of S_K(p)
  double thick_bound = 0.0;       // tau / (tau + R)
  int points = 0;
  std::vector<std::string> violations;

  bool passed() const { return violations.empty(); }
};

struct ConeVolumeOptions {
  int points = 200;        // base points p and directions v
  int mc_samples = 2000;   // uniform draws per unit normal ball
  int hull_per_dim = 2048; // hull samples per parameter direction
  std::uint64_t seed = 5;
};

// Flags a violation when a lower bound fails by more than three Monte-Carlo
// standard errors, or when the inscribed radius falls below tau/(tau+R).
ConeVolumeReport cone_volume_checks(const AnalyticManifold& m, const ConeVolumeOptions& options = {});

// Relative depth of v inside the normal cone at p (within the normal space):
// the smallest distance from the projection of v to a constraint hyperplane.
double normal_cone_depth(const AnalyticManifold& m, std::span<const Vec> hull, const Vec& p,
                         const Vec& v);

}  // namespace mfit
