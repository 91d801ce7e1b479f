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


#include "mfit/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "mfit/errors.hpp"
#include "mfit/seeds.hpp"

namespace mfit {

namespace {

void require_unit(const Vec& b, int dim, const char* who) {
  if (b.size() != dim) throw ContractError(std::string(who) + ": dimension mismatch");
  if (std::abs(b.norm() - 1.0) > 1e-9) {
    throw ContractError(std::string(who) + ": direction must be a unit vector");
  }
}

Mat identity_frame(int n) { return Mat::Identity(n, n); }

}  // namespace

ExactSupportSource::ExactSupportSource(AnalyticManifold m, SupportOracleParams params)
    : ExactSupportSource(m, std::move(params), identity_frame(m.ambient_dim()),
                         Vec::Zero(m.ambient_dim())) {}

ExactSupportSource::ExactSupportSource(AnalyticManifold m, SupportOracleParams params, Mat frame,
                                       Vec offset)
    : manifold_(std::move(m)),
      params_(std::move(params)),
      frame_(std::move(frame)),
      offset_(std::move(offset)) {
  if (frame_.rows() != manifold_.ambient_dim() || offset_.size() != frame_.rows()) {
    throw ContractError("exact source: frame and offset must live in the ambient space");
  }
  const Mat gram = frame_.transpose() * frame_;
  if ((gram - Mat::Identity(gram.rows(), gram.cols())).norm() > 1e-9) {
    throw ContractError("exact source: frame must have orthonormal columns");
  }
}

SupportEstimate ExactSupportSource::estimate(const Vec& b, long long) {
  require_unit(b, dim(), "exact source");
  std::vector<double> key(b.data(), b.data() + b.size());
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  const Vec direction = frame_ * b;
  SupportEstimate est = find_distance_exact(manifold_, direction, params_);
  est.b = b;
  est.s_est -= offset_.dot(direction);
  if (memo_.size() > 100000) memo_.clear();
  memo_.emplace(std::move(key), est);
  return est;
}

BatchSupportSource::BatchSupportSource(std::shared_ptr<const Mat> points, long long batch_size,
                                       SupportOracleParams params)
    : points_(std::move(points)), batch_size_(batch_size), params_(std::move(params)) {
  if (!points_ || batch_size_ <= 0 || points_->cols() < batch_size_) {
    throw ContractError("batch source: need at least one full batch of points");
  }
}

SupportEstimate BatchSupportSource::estimate(const Vec& b, long long batch) {
  require_unit(b, dim(), "batch source");
  if (batch < 0 || batch >= batch_count()) {
    throw ContractError("batch source: batch index out of range");
  }
  const Vec t = points_->middleCols(batch * batch_size_, batch_size_).transpose() * b;
  return find_distance(std::span<const double>(t.data(), static_cast<std::size_t>(t.size())), b,
                       params_);
}

GenerativeSupportSource::GenerativeSupportSource(AnalyticManifold m, double sigma,
                                                 long long batch_size,
                                                 SupportOracleParams params, std::uint64_t seed)
    : GenerativeSupportSource(m, sigma, batch_size, std::move(params), seed,
                              identity_frame(m.ambient_dim()), Vec::Zero(m.ambient_dim())) {}

GenerativeSupportSource::GenerativeSupportSource(AnalyticManifold m, double sigma,
                                                 long long batch_size,
                                                 SupportOracleParams params, std::uint64_t seed,
                                                 Mat frame, Vec offset)
    : manifold_(std::move(m)),
      sigma_(sigma),
      batch_size_(batch_size),
      params_(std::move(params)),
      seed_(seed),
      frame_(std::move(frame)),
      offset_(std::move(offset)) {
  if (batch_size_ <= 0 || sigma_ < 0.0) {
    throw ContractError("generative source: need batch_size > 0 and sigma >= 0");
  }
  if (frame_.rows() != manifold_.ambient_dim() || offset_.size() != frame_.rows()) {
    throw ContractError("generative source: frame and offset must live in the ambient space");
  }
}

// <S b, z> for z ~ N(0, sigma^2 I_n) is N(0, sigma^2) since |S b| = 1, so the
// projected noise is drawn directly.
SupportEstimate GenerativeSupportSource::estimate(const Vec& b, long long batch) {
  require_unit(b, dim(), "generative source");
  const std::uint64_t base = derive_seed(seed_, Stage::OracleBatch, static_cast<std::uint64_t>(batch));
  const Vec direction = frame_ * b;
  const double shift = offset_.dot(direction);
  const auto clean = manifold_.uniform_sample(static_cast<int>(batch_size_),
                                              derive_seed(base, Stage::Generate));
  std::mt19937_64 rng(derive_seed(base, Stage::Noise));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> t;
  t.reserve(clean.size());
  for (const auto& x : clean) t.push_back(direction.dot(x) - shift + sigma_ * normal(rng));
  return find_distance(t, b, params_);
}

OracleBudget::OracleBudget(long long samples_per_call, long long batches, double eta)
    : samples_per_call_(samples_per_call), batches_(batches), eta_(eta) {
  if (samples_per_call < 0 || batches <= 0 || !(eta > 0.0 && eta < 1.0)) {
    throw ContractError("oracle budget: need batches > 0 and eta in (0, 1)");
  }
}

long long OracleBudget::next() {
  if (used_ >= batches_) throw ContractError("oracle budget exhausted");
  return used_++;
}

WeakAnswer weak_validity(const Vec& b, double t, double eps, SupportSource& source,
                         OracleBudget& budget) {
  require_unit(b, source.dim(), "weak_validity");
  if (!(eps > 0.0)) throw ContractError("weak_validity: eps must be positive");
  const SupportEstimate est = source.estimate(b, budget.next());
  if (est.failed) return Failed{"support estimate failed"};
  if (est.s_est <= t + 0.5 * eps) return Valid{};
  return AlmostViolated{est.s_est};
}

WeakAnswer weak_separation(const Vec& y, double delta, SupportSource& source,
                           OracleBudget& budget, const std::vector<Vec>& hints) {
  const int dim = source.dim();
  if (y.size() != dim) throw ContractError("weak_separation: dimension mismatch");
  if (!(delta > 0.0)) throw ContractError("weak_separation: delta must be positive");
  if (y.norm() > 1.0 + delta + 1e-12) {
    throw ContractError("weak_separation: |y| must be at most 1 + delta");
  }

  struct Probe {
    Vec b;
    double margin = -kInf;
  };
  Probe best;
  bool failed = false;
  auto margin = [&](const Vec& raw) {
    const double len = raw.norm();
    if (!(len > 0.0) || failed) return -kInf;
    const Vec b = raw / len;
    const SupportEstimate est = source.estimate(b, budget.next());
    if (est.failed) {
      failed = true;
      return -kInf;
    }
    const double h = b.dot(y) - est.s_est;
    if (h > best.margin) best = {b, h};
    return h;
  };
  const double goal = 0.5 * delta;
  auto found = [&] { return best.margin > goal; };
  auto answer = [&]() -> WeakAnswer {
    if (failed) return Failed{"support estimate failed"};
    if (!found()) return InBody{};
    const double scale = best.b.cwiseAbs().maxCoeff();
    const Vec b = best.b / scale;
    return SeparatingHyperplane{b, b.dot(y)};
  };

  for (const auto& h : hints) {
    if (h.size() != dim) continue;
    margin(h);
    if (found() || failed) return answer();
  }

  if (dim == 1) {
    margin(Vec::Constant(1, 1.0));
    if (!found()) margin(Vec::Constant(1, -1.0));
    return answer();
  }

  if (dim == 2) {
    constexpr int kAngles = 16;
    auto at = [](double a) {
      Vec b(2);
      b << std::cos(a), std::sin(a);
      return b;
    };
    double best_angle = 0.0;
    double best_h = -kInf;
    for (int k = 0; k < kAngles; ++k) {
      const double a = 2.0 * std::numbers::pi * k / kAngles;
      const double h = margin(at(a));
      if (found() || failed) return answer();
      if (h > best_h) {
        best_h = h;
        best_angle = a;
      }
    }
    // Golden-section refinement between the neighbouring grid angles.
    const double step = 2.0 * std::numbers::pi / kAngles;
    double lo = best_angle - step;
    double hi = best_angle + step;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - g * (hi - lo);
    double x2 = lo + g * (hi - lo);
    double f1 = margin(at(x1));
    double f2 = margin(at(x2));
    for (int it = 0; it < 12 && !found() && !failed; ++it) {
      if (f1 > f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - g * (hi - lo);
        f1 = margin(at(x1));
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + g * (hi - lo);
        f2 = margin(at(x2));
      }
    }
    return answer();
  }

  // Pattern search on the sphere from the best hint or from y itself.
  if (best.b.size() != dim) margin(y.norm() > 0.0 ? Vec(y) : Vec(Vec::Unit(dim, 0)));
  if (best.b.size() != dim) margin(Vec::Unit(dim, 0));
  if (found() || failed) return answer();
  double step = 0.5;
  int calls = 0;
  const int max_calls = 40 * dim;
  while (step > 1e-3 && calls < max_calls) {
    bool improved = false;
    const Vec center = best.b;
    for (int k = 0; k < dim && !improved; ++k) {
      for (double sign : {1.0, -1.0}) {
        const double before = best.margin;
        margin(center + sign * step * Vec::Unit(dim, k));
        ++calls;
        if (found() || failed) return answer();
        if (best.margin > before) {
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return answer();
}

long long optimization_cap(int D, double eps, double cap_factor) {
  return static_cast<long long>(std::ceil(cap_factor * D * D * std::log(4.0 / eps)));
}

WeakAnswer weak_optimization(const Vec& b, double eps, SupportSource& source,
                             OracleBudget& budget, OptimizationStats* stats, double cap_factor) {
  const int dim = source.dim();
  require_unit(b, dim, "weak_optimization");
  if (!(eps > 0.0 && eps < 1.0)) throw ContractError("weak_optimization: eps must lie in (0, 1)");
  const long long calls_before = budget.used();
  OptimizationStats local;
  OptimizationStats& st = stats ? *stats : local;
  st = {};
  auto finish = [&](WeakAnswer a) {
    st.oracle_calls = budget.used() - calls_before;
    return a;
  };

  // Objective level: smallest t (to eps/4) that the validity oracle accepts.
  double lo = -1.0 - eps;
  double hi = 1.0 + eps;
  while (hi - lo > 0.25 * eps) {
    const double mid = 0.5 * (lo + hi);
    const WeakAnswer v = weak_validity(b, mid, eps, source, budget);
    if (std::holds_alternative<Failed>(v)) return finish(v);
    if (std::holds_alternative<Valid>(v)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  st.level = hi;
  const double target = hi - 0.25 * eps;

  // Central-cut ellipsoid {x : (x - c)^T P^-1 (x - c) <= 1}.
  Vec c = Vec::Zero(dim);
  Mat p = (1.0 + eps) * (1.0 + eps) * Mat::Identity(dim, dim);
  Vec last_cut;
  const long long cap = optimization_cap(dim, eps, cap_factor);
  const double n = dim;
  for (long long it = 0; it < cap; ++it) {
    st.iterations = static_cast<int>(it + 1);
    Vec a;
    if (b.dot(c) < target) {
      a = -b;
    } else if (c.norm() > 1.0 + 0.5 * eps) {
      // K lies in the unit ball; cut without an oracle call.
      a = c.normalized();
    } else {
      std::vector<Vec> hints;
      if (c.norm() > 0.0) hints.push_back(c.normalized());
      if (last_cut.size() == dim) hints.push_back(last_cut);
      const WeakAnswer sep = weak_separation(c, 0.5 * eps, source, budget, hints);
      if (std::holds_alternative<Failed>(sep)) return finish(sep);
      if (std::holds_alternative<InBody>(sep)) return finish(OptPoint{c});
      a = std::get<SeparatingHyperplane>(sep).b;
      last_cut = a.normalized();
    }
    const Vec pa = p * a;
    const double apa = a.dot(pa);
    if (!(apa > 0.0)) return finish(Failed{"degenerate ellipsoid"});
    const Vec g = pa / std::sqrt(apa);
    c -= g / (n + 1.0);
    if (dim == 1) {
      p *= 0.25;
    } else {
      p = (n * n / (n * n - 1.0)) * (p - (2.0 / (n + 1.0)) * g * g.transpose());
    }
  }
  return finish(Failed{"iteration cap reached"});
}

}  // namespace mfit
