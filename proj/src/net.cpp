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


#include "mfit/net.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "mfit/errors.hpp"
#include "mfit/seeds.hpp"

namespace mfit {

namespace {

Vec random_unit(int D, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec v(D);
  do {
    for (int i = 0; i < D; ++i) v(i) = normal(rng);
  } while (v.norm() < 1e-12);
  return v.normalized();
}

// Orthonormal basis of the complement of v (D x (D-1)).
Mat complement_basis(const Vec& v) {
  return Subspace::span_of(v).orthogonal_complement().basis();
}

double sphere_area(int D) {  // area of the unit (D-1)-sphere
  return D * omega_d(D);
}

}  // namespace

NetParams net_params(const GeometricBounds& bounds, double eps, int D,
                     const NetConstants& constants) {
  bounds.validate();
  if (D < bounds.d + 1) throw ContractError("net_params: need D > d");
  const double limit = constants.eps_fraction * bounds.tau / bounds.d;
  if (!(eps > 0.0 && eps < limit)) {
    std::ostringstream msg;
    msg << "net_params: eps = " << eps << " must satisfy 0 < eps < c tau / d = " << limit;
    throw ContractError(msg.str());
  }
  if (!std::isfinite(bounds.R) || !std::isfinite(bounds.Lambda)) {
    throw ContractError("net_params: R and Lambda must be finite");
  }
  NetParams p;
  p.eps = eps;
  p.D = D;
  const double tau = bounds.tau;
  const double R = bounds.R;
  p.L = constants.C_cone * R * (bounds.Lambda + 1.0 / (tau * tau));
  p.r1 = tau / (tau + R);
  p.r0 = 0.5 * p.r1;
  p.delta = std::min(std::cbrt(eps / (2.0 * R * p.L * p.L)),
                     (p.r0 * p.r0 / (R * p.L) + 1.0) * p.r0);
  p.eps_prime = p.r1 / (4.0 * p.L);
  p.accept_radius = constants.C_acc * std::sqrt(eps * R / (p.r1 * p.delta));
  p.sphere_net_cap = constants.sphere_net_cap;

  if (D == 2) {
    p.script_N_estimate = std::floor(2.0 * std::numbers::pi / p.eps_prime);
  } else {
    p.script_N_estimate =
        sphere_area(D) / (omega_d(D - 1) * std::pow(0.5 * p.eps_prime, D - 1));
  }
  const double cap = constants.sphere_net_cap > 0 ? static_cast<double>(constants.sphere_net_cap)
                                                  : std::numeric_limits<double>::max();
  p.script_N = static_cast<long long>(std::min(std::max(p.script_N_estimate, 1.0), cap));

  const int d = bounds.d;
  const double log_n0 = (D + d) * std::log(4.0 * R / tau) + std::log(bounds.V) -
                        std::log(omega_d(d)) - d * std::log(eps);
  p.N0_formula = std::ceil(std::exp(log_n0));
  const double n0_cap = constants.n0_cap > 0 ? static_cast<double>(constants.n0_cap)
                                             : static_cast<double>(1LL << 62);
  p.N0 = static_cast<long long>(std::min(p.N0_formula, n0_cap));
  return p;
}

std::vector<Vec> sphere_net(const Vec& v, double delta, double eps_prime, int D, long long cap,
                            std::uint64_t seed) {
  if (v.size() != D || std::abs(v.norm() - 1.0) > 1e-9) {
    throw ContractError("sphere_net: v must be a unit vector in R^D");
  }
  const double spacing = eps_prime * delta;
  if (!(spacing > 0.0)) throw ContractError("sphere_net: eps_prime * delta must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw ContractError("sphere_net: delta must lie in (0, 1)");
  const Vec center = (1.0 - delta) * v;
  std::vector<Vec> out;
  if (D == 1) {
    out.push_back(v);
    if (cap != 1) out.push_back(Vec(center - delta * v));
    return out;
  }
  const Mat perp = complement_basis(v);

  if (D == 2) {
    long long count = static_cast<long long>(std::floor(2.0 * std::numbers::pi / eps_prime));
    count = std::max<long long>(count, 1);
    if (cap > 0) count = std::min(count, cap);
    const Vec u = perp.col(0);
    for (long long k = 0; k < count; ++k) {
      const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
      out.push_back(center + delta * (std::cos(a) * v + std::sin(a) * u));
    }
    return out;
  }

  // Candidates: v first, then seeded uniform points of the sphere.
  std::mt19937_64 rng(seed);
  const double estimate = sphere_area(D) / (omega_d(D - 1) * std::pow(0.5 * eps_prime, D - 1));
  const long long want = cap > 0 ? std::min<long long>(cap, static_cast<long long>(estimate) + 1)
                                 : static_cast<long long>(estimate) + 1;
  const long long candidates = std::clamp<long long>(20 * want, 2000, 200000);
  std::vector<Vec> pool;
  pool.reserve(static_cast<std::size_t>(candidates));
  pool.push_back(v);
  for (long long k = 1; k < candidates; ++k) pool.push_back(random_unit(D, rng));

  // Farthest-point order from v, stopped at half the spacing (or the cap) so
  // the pool's own mesh gap stays inside the covering radius.
  std::vector<double> gap(pool.size(), kInf);
  std::vector<char> used(pool.size(), 0);
  std::size_t pick = 0;
  while (true) {
    used[pick] = 1;
    out.push_back(center + delta * pool[pick]);
    if (cap > 0 && static_cast<long long>(out.size()) >= cap) break;
    std::size_t next = pool.size();
    double far = -1.0;
    for (std::size_t k = 0; k < pool.size(); ++k) {
      if (used[k]) continue;
      gap[k] = std::min(gap[k], delta * (pool[k] - pool[pick]).norm());
      if (gap[k] > far) {
        far = gap[k];
        next = k;
      }
    }
    if (next == pool.size() || far < 0.5 * spacing) break;
    pick = next;
  }
  return out;
}

BallTestResult ball_tester(const Vec& v, const NetParams& params, SupportSource& source,
                           OracleBudget& budget, const NetRunOptions& options) {
  BallTestResult out;
  const auto net =
      sphere_net(v, params.delta, params.eps_prime, params.D, params.sphere_net_cap);
  for (std::size_t i = 0; i < net.size(); ++i) {
    const Vec direction = net[i].normalized();
    const WeakAnswer a = weak_optimization(direction, options.opt_eps, source, budget, nullptr,
                                           options.cap_factor);
    ++out.tested;
    const auto* opt = std::get_if<OptPoint>(&a);
    if (!opt) {
      out.status = TesterStatus::Failed;
      const auto* f = std::get_if<Failed>(&a);
      out.reason = f ? f->reason : "unexpected oracle answer";
      return out;
    }
    if (i == 0) {
      out.y = opt->y;
      continue;
    }
    out.spread = std::max(out.spread, (opt->y - out.y).norm());
    if (!(out.spread < params.accept_radius)) {
      out.status = TesterStatus::DeclaredBoundary;
      return out;
    }
  }
  out.status = TesterStatus::Accepted;
  return out;
}

std::vector<Vec> ReconstructionNet::points() const {
  std::vector<Vec> out;
  for (const auto& e : entries) {
    if (e.accepted) out.push_back(e.point);
  }
  return out;
}

ReconstructionNet find_points(const NetParams& params, const GeometricBounds& bounds,
                              SupportSource& source, OracleBudget& budget, std::uint64_t seed,
                              const NetRunOptions& options) {
  if (source.dim() != params.D) throw ContractError("find_points: source dimension differs from D");
  ReconstructionNet net;
  net.acceptance_bound =
      std::pow(2.0, -2.0 * params.D) * std::pow(bounds.tau / bounds.R, params.D + bounds.d);
  for (long long j = 0; j < params.N0; ++j) {
    std::mt19937_64 rng(derive_seed(seed, Stage::FindPoints, static_cast<std::uint64_t>(j)));
    const Vec v = random_unit(params.D, rng);
    const BallTestResult r = ball_tester(v, params, source, budget, options);
    NetEntry e;
    e.direction = v;
    e.point = r.y;
    e.spread = r.spread;
    e.accepted = r.status == TesterStatus::Accepted;
    e.failed = r.status == TesterStatus::Failed;
    net.accepted += e.accepted ? 1 : 0;
    net.failures += e.failed ? 1 : 0;
    net.entries.push_back(std::move(e));
  }
  net.iterations = params.N0;
  if (net.iterations > 0 && net.failures == net.iterations) {
    throw ContractError("find_points: every ball test failed");
  }
  net.acceptance_rate =
      net.iterations > 0 ? static_cast<double>(net.accepted) / static_cast<double>(net.iterations)
                         : 0.0;
  std::clog << "find_points: accepted " << net.accepted << " of " << net.iterations
            << " (rate " << net.acceptance_rate << ", deep-direction bound "
            << net.acceptance_bound << ")\n";
  return net;
}

FiberStabilityReport fiber_stability_check(const AnalyticManifold& m, int pairs,
                                           const NetParams& params, std::uint64_t seed,
                                           int hull_samples) {
  const auto kind = m.kind();
  if (kind != ManifoldKind::Circle && kind != ManifoldKind::Ellipse &&
      kind != ManifoldKind::Sphere) {
    throw ContractError("fiber_stability_check: needs a convex hypersurface");
  }
  const int D = m.ambient_dim();
  if (m.dim() != D - 1) throw ContractError("fiber_stability_check: needs codimension one");
  FiberStabilityReport report;
  const auto& g = m.bounds();
  const double delta = params.delta;
  const double scale = g.R * params.L * delta / (params.r0 * params.r0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto hull = m.uniform_sample(hull_samples, seed + 1);

  for (int k = 0; k < pairs; ++k) {
    const Vec v = random_unit(D, rng);
    // v' = v + w with |w| < delta, w uniform in the delta ball.
    const Vec w = random_unit(D, rng) * delta * std::pow(unif(rng), 1.0 / D) * (1.0 - 1e-12);
    const Vec p = m.support_point(v);
    const Vec q = m.support_point(v + w);
    ++report.pairs;
    report.max_displacement_ratio = std::max(report.max_displacement_ratio, (p - q).norm() / scale);

    // The fiber over p is the segment [0, nu_p]; (1 - delta) nu_p centres a
    // delta ball inside it.
    const Vec vp = (1.0 - delta) * v.normalized();
    const Vec centre = p - g.R * vp / delta;
    const double radius = g.R / delta;
    for (const auto& x : hull) {
      ++report.containment_checks;
      const double excess = (x - centre).norm() - radius;
      report.max_containment_excess = std::max(report.max_containment_excess, excess);
      if (excess > 1e-9 * radius) ++report.containment_violations;
    }
  }
  return report;
}

}  // namespace mfit
