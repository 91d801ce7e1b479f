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


#include "mfit/support_oracle.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mfit/errors.hpp"
#include "mfit/quadrature.hpp"
#include "shapes.hpp"

namespace mfit {

namespace {

// log(exp(hi) - exp(lo)) for lo <= hi.
double log_diff_exp(double hi, double lo) {
  if (lo == -kInf) return hi;
  return hi + std::log(-std::expm1(lo - hi));
}

void require_unit(const Vec& b, const char* who) {
  if (b.size() == 0 || std::abs(b.norm() - 1.0) > 1e-9) {
    throw ContractError(std::string(who) + ": direction must be a unit vector");
  }
}

// log V - log((sqrt(delta) tau)^d omega_d) = log(kappa1 / kappa0).
double log_volume_ratio(const GeometricBounds& g, double delta) {
  return std::log(g.V) - g.d * std::log(std::sqrt(delta) * g.tau) - std::log(omega_d(g.d));
}

}  // namespace

double SupportOracleParams::gamma_delta() const { return std::exp(log_gamma_delta); }

void set_scan_range(SupportOracleParams& p, long long extra_slabs) {
  const double slack = p.delta * p.bounds.tau;
  p.j_minus = static_cast<long long>(std::floor((p.r_delta - 1.0 - slack) / p.delta)) - 1;
  p.j_plus = static_cast<long long>(std::floor((p.r_delta + 1.0 + slack) / p.delta)) + 1 +
             extra_slabs;
}

SupportOracleParams make_params(const GeometricBounds& bounds, double sigma, double eps,
                                double eta) {
  bounds.validate();
  if (!(sigma > 0.0)) throw ContractError("support oracle: sigma must be positive");
  if (!(eta > 0.0 && eta < 1.0)) throw ContractError("support oracle: eta must lie in (0, 1)");
  const double tau = bounds.tau;
  const double limit = std::min({1.0 / 16.0, sigma / tau, sigma * sigma / tau});
  if (!(eps > 0.0 && eps < limit)) {
    std::ostringstream msg;
    msg << "support oracle: eps = " << eps
        << " violates 0 < eps < min(1/16, sigma/tau, sigma^2/tau) = " << limit;
    throw ContractError(msg.str());
  }

  SupportOracleParams p;
  p.eps = eps;
  p.delta = eps / 16.0;
  p.sigma = sigma;
  p.eta = eta;
  p.bounds = bounds;
  const double log_ratio = log_volume_ratio(bounds, p.delta);
  if (log_ratio < 1.0) {
    throw ContractError("support oracle: V is below e (sqrt(delta) tau)^d omega_d");
  }
  p.kappa0 = std::sqrt(2.0 * std::numbers::pi) * sigma;
  p.kappa1 = std::exp(log_ratio) * p.kappa0;
  const double a = sigma / (p.delta * tau) * log_ratio;
  p.log_gamma_delta = -std::log(p.kappa1) - 0.5 * a * a;
  p.r_delta = sigma * sigma / (p.delta * tau) * log_ratio;
  p.log_D0 = std::log(std::numbers::sqrt2 * sigma) + std::log(p.kappa1) + 0.5 * a * a;
  p.log_a_threshold = 2.0 * std::log(p.delta) - std::log(6.0) - p.log_D0;
  set_scan_range(p);
  return p;
}

// Mean first-crossing level for the Poisson slab counts of a radius-tau
// sphere, relative to its support value.
SupportOracleParams calibrate(const SupportOracleParams& params, long long samples,
                              const CalibrationOptions& options) {
  if (samples <= 0 || options.slab_count < 0 || options.phases < 1) {
    throw ContractError("calibrate: need samples > 0, slab_count >= 0, phases >= 1");
  }
  if (samples <= options.slab_count) {
    throw ContractError("find_distance: per-call sample count must exceed the slab count");
  }
  const double tau = params.bounds.tau;
  const double sigma = params.sigma;
  const double delta = params.delta;
  const double count = static_cast<double>(options.slab_count);
  const double log_mass = std::log(static_cast<double>(samples) * delta);

  const int d = params.bounds.d;
  const auto nodes = detail::theta_nodes(tau, d - 1, 0.25 * sigma / std::sqrt(tau), 16);
  auto log_tail = [&](double gamma) {
    std::vector<double> terms;
    terms.reserve(nodes.size());
    for (const auto& n : nodes) terms.push_back(n.log_weight + log_normal_tail((gamma - n.t) / sigma));
    return log_sum_exp(terms);
  };

  const long long span = static_cast<long long>(std::ceil((tau + 12.0 * sigma + 2.0) / delta));
  double offset_sum = 0.0;
  for (int phase = 0; phase < options.phases; ++phase) {
    const double shift = delta * phase / options.phases;
    // Reference sphere centred at `shift`; scanning starts at its centre.
    const long long j0 = static_cast<long long>(std::floor(shift / delta));
    double survive = 1.0;
    double mean = 0.0;
    double upper = log_tail((j0 + 1) * delta - shift);
    for (long long j = j0 + 1; j <= j0 + span && survive > 1e-15; ++j) {
      const double lower = upper;
      upper = log_tail((j + 1) * delta - shift);
      const double mu = static_cast<double>(samples) * std::exp(log_diff_exp(lower, upper));
      const double stop = boost::math::gamma_q(count + 1.0, mu);
      mean += survive * stop * (j * delta);
      survive *= 1.0 - stop;
    }
    if (survive > 1e-9) throw ContractError("calibrate: first-crossing law did not converge");
    offset_sum += mean - (tau + shift);
  }

  SupportOracleParams p = params;
  p.mode = ThresholdMode::Calibrated;
  p.slab_count = options.slab_count;
  p.samples = samples;
  p.log_gamma_delta = std::log(count) - log_mass;
  p.r_delta = offset_sum / options.phases;
  set_scan_range(p, static_cast<long long>(std::ceil(p.eps / delta)));
  return p;
}

double slab_fraction(std::span<const double> projections, double gamma, double delta) {
  if (projections.empty()) throw ContractError("slab_fraction: no points");
  if (!(delta > 0.0)) throw ContractError("slab_fraction: delta must be positive");
  const double top = gamma + delta;
  const auto hits = std::count_if(projections.begin(), projections.end(),
                                  [&](double t) { return gamma < t && t <= top; });
  return static_cast<double>(hits) / (static_cast<double>(projections.size()) * delta);
}

double slab_fraction(const Mat& points, const Vec& b, double gamma, double delta) {
  const Vec t = points.transpose() * b;
  return slab_fraction(std::span<const double>(t.data(), static_cast<std::size_t>(t.size())),
                       gamma, delta);
}

double slab_fraction(const std::vector<Vec>& points, const Vec& b, double gamma, double delta) {
  std::vector<double> t;
  t.reserve(points.size());
  for (const auto& x : points) t.push_back(b.dot(x));
  return slab_fraction(t, gamma, delta);
}

SupportEstimate find_distance(std::span<const double> projections, const Vec& b,
                              const SupportOracleParams& params) {
  require_unit(b, "find_distance");
  if (projections.empty()) throw ContractError("find_distance: no points");
  const long long n = static_cast<long long>(projections.size());
  if (params.mode == ThresholdMode::Calibrated && n != params.samples) {
    throw ContractError("find_distance: batch size differs from the calibrated sample count");
  }
  const double delta = params.delta;
  SupportEstimate out;
  out.b = b;
  out.samples_used = n;
  out.failed = true;
  out.j_star = params.j_plus;
  if (params.j_plus <= params.j_minus) return out;

  // Slab j is (j delta, (j + 1) delta]; one histogram pass over the scan range.
  const long long first = params.j_minus + 1;
  std::vector<long long> counts(static_cast<std::size_t>(params.j_plus - first + 1), 0);
  for (double t : projections) {
    long long j = static_cast<long long>(std::ceil(t / delta)) - 1;
    while (t <= j * delta) --j;
    while (t > (j + 1) * delta) ++j;
    if (j >= first && j <= params.j_plus) ++counts[static_cast<std::size_t>(j - first)];
  }
  const double log_mass = std::log(static_cast<double>(n) * delta);
  for (long long j = first; j <= params.j_plus; ++j) {
    const long long c = counts[static_cast<std::size_t>(j - first)];
    const bool below = params.mode == ThresholdMode::Calibrated
                           ? c <= params.slab_count
                           : (c == 0 || std::log(static_cast<double>(c)) - log_mass <=
                                            params.log_gamma_delta);
    if (below) {
      out.j_star = j;
      out.s_est = j * delta - params.r_delta;
      out.failed = false;
      return out;
    }
  }
  return out;
}

SupportEstimate find_distance(const Mat& points, const Vec& b, const SupportOracleParams& params) {
  require_unit(b, "find_distance");
  if (points.rows() != b.size()) throw ContractError("find_distance: dimension mismatch");
  const Vec t = points.transpose() * b;
  return find_distance(std::span<const double>(t.data(), static_cast<std::size_t>(t.size())), b,
                       params);
}

SupportEstimate find_distance(const std::vector<Vec>& points, const Vec& b,
                              const SupportOracleParams& params) {
  std::vector<double> t;
  t.reserve(points.size());
  for (const auto& x : points) {
    if (x.size() != b.size()) throw ContractError("find_distance: dimension mismatch");
    t.push_back(b.dot(x));
  }
  return find_distance(t, b, params);
}

ProjectedDensity::ProjectedDensity(const AnalyticManifold& m, const Vec& b, double sigma,
                                   double reference, int order)
    : sigma_(sigma) {
  require_unit(b, "projected density");
  if (!(sigma > 0.0)) throw ContractError("projected density: sigma must be positive");
  support_ = m.support(b);
  const double curvature = m.support_curvature(b);
  const double width = curvature > 0.0
                           ? 0.5 * sigma / std::sqrt((std::max(reference - support_, 0.0) + sigma) *
                                                     curvature)
                           : kInf;
  nodes_ = m.projection_nodes(b, width, order);
}

double ProjectedDensity::log_density(double gamma) const {
  std::vector<double> terms;
  terms.reserve(nodes_.size());
  for (const auto& n : nodes_) {
    terms.push_back(n.log_weight + log_normal_density((gamma - n.t) / sigma_));
  }
  return log_sum_exp(terms) - std::log(sigma_);
}

double ProjectedDensity::log_tail(double gamma) const {
  std::vector<double> terms;
  terms.reserve(nodes_.size());
  for (const auto& n : nodes_) {
    terms.push_back(n.log_weight + log_normal_tail((gamma - n.t) / sigma_));
  }
  return log_sum_exp(terms);
}

double ProjectedDensity::log_cdf(double gamma) const {
  std::vector<double> terms;
  terms.reserve(nodes_.size());
  for (const auto& n : nodes_) {
    terms.push_back(n.log_weight + log_normal_tail((n.t - gamma) / sigma_));
  }
  return log_sum_exp(terms);
}

double ProjectedDensity::log_slab_average(double gamma, double delta) const {
  // Difference the smaller of the two tails to keep precision.
  const double upper = log_tail(gamma);
  const double mass = upper < -std::numbers::ln2
                          ? log_diff_exp(upper, log_tail(gamma + delta))
                          : log_diff_exp(log_cdf(gamma + delta), log_cdf(gamma));
  return mass - std::log(delta);
}

double log_gamma_exact(const AnalyticManifold& m, double sigma, double gamma, const Vec& b) {
  const double coarse = ProjectedDensity(m, b, sigma, gamma, 8).log_density(gamma);
  const double fine = ProjectedDensity(m, b, sigma, gamma, 16).log_density(gamma);
  const double residual = std::abs(std::expm1(coarse - fine));
  if (!(residual <= 1e-6)) {
    std::ostringstream msg;
    msg << "gamma_exact: quadrature did not converge at gamma = " << gamma
        << " (relative residual " << residual << ")";
    throw ContractError(msg.str());
  }
  return fine;
}

double gamma_exact(const AnalyticManifold& m, double sigma, double gamma, const Vec& b) {
  return std::exp(log_gamma_exact(m, sigma, gamma, b));
}

SupportEstimate find_distance_exact(const AnalyticManifold& m, const Vec& b,
                                    const SupportOracleParams& params) {
  require_unit(b, "find_distance_exact");
  if (b.size() != m.ambient_dim()) throw ContractError("find_distance_exact: dimension mismatch");
  const double delta = params.delta;
  const ProjectedDensity density(m, b, params.sigma, m.support(b) + params.r_delta);

  SupportEstimate out;
  out.b = b;
  out.failed = true;
  out.j_star = params.j_plus;
  auto below = [&](long long j) {
    return density.log_slab_average(j * delta, delta) <= params.log_gamma_delta;
  };
  long long hit = params.j_plus + 1;
  if (params.j_minus * delta >= 1.0) {
    // Slab averages are strictly decreasing for gamma >= 1: bisect for the
    // first slab at or below the threshold.
    long long lo = params.j_minus;     // invariant: slabs <= lo are above
    long long hi = params.j_plus + 1;  // invariant: slab hi is below, or past the range
    while (hi - lo > 1) {
      const long long mid = lo + (hi - lo) / 2;
      if (below(mid)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    hit = hi;
  } else {
    // Coarse steps of 16 slabs (one eps), then a slab-by-slab refinement.
    constexpr long long kStride = 16;
    long long lo = params.j_minus;
    hit = params.j_plus + 1;
    for (long long j = params.j_minus + kStride; j <= params.j_plus; j += kStride) {
      if (below(j)) {
        hit = j;
        break;
      }
      lo = j;
    }
    for (long long j = lo + 1; j < std::min(hit, params.j_plus + 1); ++j) {
      if (below(j)) {
        hit = j;
        break;
      }
    }
  }
  if (hit <= params.j_plus) {
    out.j_star = hit;
    out.s_est = hit * delta - params.r_delta;
    out.failed = false;
  }
  return out;
}

double ell(double log_gamma, double kappa, double sigma) {
  const double arg = -log_gamma - std::log(kappa);
  return std::sqrt(2.0 * sigma * sigma * std::max(arg, 0.0));
}

DistanceSandwich distance_sandwich(double log_gamma, const SupportOracleParams& p) {
  DistanceSandwich s;
  const double dt = p.delta * p.bounds.tau;
  s.lower = -dt + ell(log_gamma, p.kappa1, p.sigma);
  s.upper = ell(log_gamma, p.kappa0, p.sigma);
  const double arg = -log_gamma - std::log(p.kappa1);
  s.gap_hypothesis =
      arg > 0.0 && p.sigma * std::log(p.kappa1 / p.kappa0) <= dt * std::sqrt(2.0 * arg);
  return s;
}

double theoretical_sample_bound(const SupportOracleParams& p) {
  const auto& g = p.bounds;
  const double width = std::sqrt(p.eps) * g.tau / 4.0;
  const double log_ratio = std::log(g.V) - g.d * std::log(width) - std::log(omega_d(g.d));
  const double log_lead = std::log(3.0 * 1024.0 * std::sqrt(2.0 * std::numbers::pi) * p.sigma *
                                   p.sigma / (p.delta * p.delta)) +
                          log_ratio;
  const double expo = p.sigma / (p.eps * g.tau / 4.0) * log_ratio;
  const double log_n = 3.0 * log_lead + expo * expo + std::log(std::log(1.0 / p.eta));
  return log_n / std::numbers::ln10;
}

GlivenkoCantelliReport glivenko_cantelli_check(const std::vector<Mat>& trials,
                                               const std::vector<Vec>& directions,
                                               std::span<const double> gammas,
                                               const AnalyticManifold& m, double sigma,
                                               double a_threshold) {
  GlivenkoCantelliReport report;
  report.a_threshold = a_threshold;
  std::vector<std::vector<double>> expected;
  for (const auto& b : directions) {
    const ProjectedDensity density(m, b, sigma, m.support(b), 16);
    std::vector<double> tails;
    for (double g : gammas) tails.push_back(std::exp(density.log_tail(g)));
    expected.push_back(std::move(tails));
  }
  int exceed = 0;
  for (const auto& points : trials) {
    double worst = 0.0;
    for (std::size_t k = 0; k < directions.size(); ++k) {
      const Vec t = points.transpose() * directions[k];
      const auto& tails = expected[k];
      std::size_t i = 0;
      worst = std::max(
          worst, empirical_tail_deviation(
                     std::span<const double>(t.data(), static_cast<std::size_t>(t.size())),
                     gammas, [&](double) { return tails[i++]; }));
    }
    report.sup_deviation.push_back(worst);
    if (worst > a_threshold) ++exceed;
  }
  report.exceed_fraction =
      trials.empty() ? 0.0 : static_cast<double>(exceed) / static_cast<double>(trials.size());
  return report;
}

}  // namespace mfit
