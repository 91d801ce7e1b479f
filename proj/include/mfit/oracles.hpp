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
#include <map>
#include <memory>
#include <variant>
#include <vector>

#include "mfit/manifold.hpp"
#include "mfit/support_oracle.hpp"

namespace mfit {

// Source of support estimates s_est(b). Batch k must be disjoint from every
// other batch (fresh samples per call).
class SupportSource {
 public:
  virtual ~SupportSource() = default;
  virtual int dim() const = 0;
  virtual SupportEstimate estimate(const Vec& b, long long batch) = 0;
  virtual const SupportOracleParams& params() const = 0;
};

// Quadrature-backed estimates for a known manifold, optionally seen through
// an orthonormal frame S (n x D) and offset mu: directions b in R^D act as
// S b and the result is shifted by -<mu, S b>. Deterministic, memoized per b.
class ExactSupportSource final : public SupportSource {
 public:
  ExactSupportSource(AnalyticManifold m, SupportOracleParams params);
  ExactSupportSource(AnalyticManifold m, SupportOracleParams params, Mat frame, Vec offset);

  int dim() const override { return static_cast<int>(frame_.cols()); }
  SupportEstimate estimate(const Vec& b, long long batch) override;
  const SupportOracleParams& params() const override { return params_; }

 private:
  AnalyticManifold manifold_;
  SupportOracleParams params_;
  Mat frame_;
  Vec offset_;
  std::map<std::vector<double>, SupportEstimate> memo_;
};

// Disjoint column blocks of a fixed point matrix (D x total).
class BatchSupportSource final : public SupportSource {
 public:
  BatchSupportSource(std::shared_ptr<const Mat> points, long long batch_size,
                     SupportOracleParams params);

  int dim() const override { return static_cast<int>(points_->rows()); }
  long long batch_count() const { return points_->cols() / batch_size_; }
  SupportEstimate estimate(const Vec& b, long long batch) override;
  const SupportOracleParams& params() const override { return params_; }

 private:
  std::shared_ptr<const Mat> points_;
  long long batch_size_;
  SupportOracleParams params_;
};

// Fresh noisy samples of m (projected by frame/offset) drawn per batch from
// derive_seed(seed, OracleBatch, batch).
class GenerativeSupportSource final : public SupportSource {
 public:
  GenerativeSupportSource(AnalyticManifold m, double sigma, long long batch_size,
                          SupportOracleParams params, std::uint64_t seed);
  GenerativeSupportSource(AnalyticManifold m, double sigma, long long batch_size,
                          SupportOracleParams params, std::uint64_t seed, Mat frame, Vec offset);

  int dim() const override { return static_cast<int>(frame_.cols()); }
  SupportEstimate estimate(const Vec& b, long long batch) override;
  const SupportOracleParams& params() const override { return params_; }

 private:
  AnalyticManifold manifold_;
  double sigma_;
  long long batch_size_;
  SupportOracleParams params_;
  std::uint64_t seed_;
  Mat frame_;
  Vec offset_;
};

// Hands out disjoint batch indices; the failure probability eta is split
// evenly across the declared number of calls.
class OracleBudget {
 public:
  OracleBudget(long long samples_per_call, long long batches, double eta);

  // Index of the next unused batch. Throws ContractError when exhausted.
  long long next();
  long long used() const { return used_; }
  long long batches() const { return batches_; }
  long long samples_per_call() const { return samples_per_call_; }
  double eta_per_call() const { return eta_ / static_cast<double>(batches_); }

 private:
  long long samples_per_call_;
  long long batches_;
  double eta_;
  long long used_ = 0;
};

struct Valid {};
struct AlmostViolated {
  double level = 0.0;  // the estimated support value that exceeded t + eps/2
};
struct InBody {};
struct SeparatingHyperplane {
  Vec b;  // infinity norm 1
  double offset = 0.0;  // <b, y>
};
struct OptPoint {
  Vec y;
};
struct Failed {
  std::string reason;
};
using WeakAnswer =
    std::variant<Valid, AlmostViolated, InBody, SeparatingHyperplane, OptPoint, Failed>;

// Answers Valid iff s_est(b) <= t + eps/2.
WeakAnswer weak_validity(const Vec& b, double t, double eps, SupportSource& source,
                         OracleBudget& budget);

// Searches for b maximizing <b, y> - s_est(b). Returns a hyperplane when the
// margin exceeds delta/2, otherwise InBody. Callers should use estimator
// accuracy at most delta/2. `hints` are tried first.
WeakAnswer weak_separation(const Vec& y, double delta, SupportSource& source,
                           OracleBudget& budget, const std::vector<Vec>& hints = {});

struct OptimizationStats {
  int iterations = 0;
  long long oracle_calls = 0;
  double level = 0.0;  // bisection estimate of s(b)
};

// Iteration cap ceil(10 D^2 ln(4/eps)) (scaled by cap_factor / 10).
long long optimization_cap(int D, double eps, double cap_factor = 10.0);

// Objective-level bisection followed by a central-cut ellipsoid over the
// ball of radius 1 + eps. Estimator accuracy should be at most eps/4.
WeakAnswer weak_optimization(const Vec& b, double eps, SupportSource& source,
                             OracleBudget& budget, OptimizationStats* stats = nullptr,
                             double cap_factor = 10.0);

}  // namespace mfit
