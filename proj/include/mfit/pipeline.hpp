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

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "mfit/atlas.hpp"
#include "mfit/config.hpp"
#include "mfit/errors.hpp"
#include "mfit/implicit.hpp"
#include "mfit/net.hpp"
#include "mfit/support_oracle.hpp"

namespace mfit {

// A ContractError raised inside a named pipeline stage; what() is
// "[stage] message".
class StageError : public ContractError {
 public:
  StageError(std::string stage, const std::string& message);
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct DatasetPaths {
  std::string clean;
  std::string noisy;
  std::string manifest;
};

// Writes clean.mfpc, noisy.mfpc and manifest.json (config plus derived
// seeds) into out_dir. Output depends only on the config.
DatasetPaths cmd_generate(const ExperimentConfig& config, const std::string& out_dir);

struct PipelineResult {
  GeometricBounds bounds;        // ambient bounds after overrides
  Mat frame;                     // n x D PCA frame
  Vec offset;                    // PCA mean (zero when D = n)
  SupportOracleParams oracle;
  NetParams net_params;
  ReconstructionNet net;         // points and directions in ambient coordinates
  AtlasReport atlas_report;
  WeightReport weight_report;
  ImplicitManifold manifold;
  long long oracle_calls = 0;
};

// PCA, oracles, Find-points, atlas and weights on ambient observations.
// Progress goes to `log`; stage failures are rethrown as StageError.
PipelineResult run_pipeline(const ExperimentConfig& config, const std::vector<Vec>& observations,
                            std::ostream& log);

struct FitPaths {
  std::string net;
  std::string manifold;
  std::string log;
};

// Reads data_dir/noisy.mfpc and writes net.mfpc, manifold.txt and fit.log.
FitPaths cmd_fit(const ExperimentConfig& config, const std::string& data_dir,
                 const std::string& out_dir, PipelineResult* result = nullptr);

struct CheckRow {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct MetricsReport {
  std::string artifact_kind;  // config | cloud | net | implicit
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<CheckRow> checks;

  bool all_passed() const;
  double metric(const std::string& name) const;  // NaN when absent
  std::string to_text() const;
};

// Compares an artifact (config JSON, point cloud, net or implicit manifold)
// with the truth config's manifold. An implicit manifold next to a net.mfpc
// also gets the Hausdorff-versus-net-resolution check.
MetricsReport cmd_evaluate(const ExperimentConfig& truth, const std::string& artifact_path);

// Hausdorff distance between a point set and a uniform sample of m.
double net_resolution(const AnalyticManifold& m, const std::vector<Vec>& points, int samples,
                      std::uint64_t seed);

// Property checks on an implicit manifold, run at its own projected samples.
std::vector<CheckRow> implicit_property_checks(const ImplicitManifold& im,
                                            const std::vector<Vec>& points, double c_frob);

}  // namespace mfit
