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
#include <optional>
#include <string>
#include <vector>

#include "mfit/geometry.hpp"
#include "mfit/manifold.hpp"
#include "mfit/oracles.hpp"

namespace mfit {

struct NetConstants {
  double C_cone = 4.0;      // L = C_cone R (Lambda + tau^-2)
  double C_acc = 4.0;       // accept_radius = C_acc sqrt(eps R / (r1 delta))
  double eps_fraction = 1.0;  // requires eps < eps_fraction * tau / d
  long long sphere_net_cap = 0;  // 0: no cap
  long long n0_cap = 0;          // 0: no cap
};

struct NetParams {
  double eps = 0.0;
  int D = 0;
  double L = 0.0;
  double r1 = 0.0;
  double r0 = 0.0;
  double delta = 0.0;
  double eps_prime = 0.0;
  long long script_N = 0;  // sphere-net cardinality actually used
  double script_N_estimate = 0.0;  // uncapped cardinality (exact for D = 2)
  long long N0 = 0;        // iterations actually used
  double N0_formula = 0.0;  // may exceed 64-bit range
  double accept_radius = 0.0;
  long long sphere_net_cap = 0;
};

NetParams net_params(const GeometricBounds& bounds, double eps, int D,
                     const NetConstants& constants = {});

// Net of the sphere of radius delta centred at (1 - delta) v with spacing
// eps_prime * delta; v itself comes first. Cardinality is at most `cap` when
// cap > 0 (the spacing is widened). D = 2 is built exactly; D >= 3 greedily
// from seeded candidates.
std::vector<Vec> sphere_net(const Vec& v, double delta, double eps_prime, int D,
                            long long cap = 0, std::uint64_t seed = 17);

enum class TesterStatus { Accepted, DeclaredBoundary, Failed };

struct BallTestResult {
  TesterStatus status = TesterStatus::Failed;
  Vec y;               // y_1, the optimizer for v
  double spread = 0.0;  // max |y_1 - y_i| over the tested indices
  int tested = 0;       // optimizations run (stops at the first spread violation)
  std::string reason;
};

struct NetRunOptions {
  double opt_eps = 0.02;     // weak-optimization accuracy (c eps)
  double cap_factor = 10.0;  // optimization iteration cap factor
};

BallTestResult ball_tester(const Vec& v, const NetParams& params, SupportSource& source,
                           OracleBudget& budget, const NetRunOptions& options = {});

struct NetEntry {
  Vec point;
  Vec direction;
  bool accepted = false;
  bool failed = false;
  double spread = 0.0;
};

struct ReconstructionNet {
  std::vector<NetEntry> entries;
  long long iterations = 0;
  long long accepted = 0;
  long long failures = 0;
  double acceptance_rate = 0.0;
  double acceptance_bound = 0.0;  // 2^{-2D} (tau/R)^{D+d}

  std::vector<Vec> points() const;  // accepted points in run order
};

// N0 ball tests on directions uniform on the unit sphere, drawn from
// derive_seed(seed, FindPoints, j). Throws if every iteration failed.
ReconstructionNet find_points(const NetParams& params, const GeometricBounds& bounds,
                              SupportSource& source, OracleBudget& budget, std::uint64_t seed,
                              const NetRunOptions& options = {});

struct FiberStabilityReport {
  int pairs = 0;
  double max_displacement_ratio = 0.0;  // |x_v - x_v'| / (R L delta / r0^2)
  int containment_checks = 0;
  int containment_violations = 0;
  double max_containment_excess = 0.0;  // max |q - centre| - R/delta over hull samples
};

// Base-point displacement of the fiber map for random pairs |v - v'| < delta
// and the circumscribing-ball containment B_{R/delta}(p - R v_p / delta) of
// hull samples. For convex hypersurfaces (circle, ellipse, sphere).
FiberStabilityReport fiber_stability_check(const AnalyticManifold& m, int pairs,
                                           const NetParams& params, std::uint64_t seed = 23,
                                           int hull_samples = 2000);

}  // namespace mfit
