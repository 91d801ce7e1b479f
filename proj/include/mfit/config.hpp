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
#include <limits>
#include <string>
#include <vector>

#include "mfit/geometry.hpp"
#include "mfit/manifold.hpp"

namespace mfit {

enum class OracleMode { Exact, Sampled };

inline constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

struct ManifoldSpec {
  std::string kind = "circle";  // circle | ellipse | sphere | torus | flat_disc
  int n = 2;
  int d = 1;                    // sphere and flat_disc only
  double radius = 1.0;          // circle, sphere, flat_disc
  double a = 1.0, b = 0.5;      // ellipse semi-axes
  double major = 0.7, minor = 0.3;  // torus
};

// Tunable constants. Every key present in the document's "constants" object
// is recorded in `overridden` and echoed in the fit log header.
struct ConstantSet {
  double C_cone = 4.0;
  double C_acc = 4.0;
  double c_lo = 0.1;
  double C_w = 8.0;
  double C_frob = 2.0;
  double cap_factor = 10.0;
  double subnet_c = 0.1;
  double radius_factor = 3.0;
  long long sphere_net_cap = 32;
  long long n0_cap = 400;
  std::vector<std::string> overridden;
};

struct ExperimentConfig {
  ManifoldSpec manifold;
  // Optional overrides of the manifold's geometric bounds (kUnset = keep).
  double tau = kUnset, V = kUnset, R = kUnset, Lambda = kUnset;
  double sigma = 0.1;
  double eps = 0.01;      // net accuracy
  double opt_eps = 0.02;  // weak optimization accuracy; Find-Distance uses opt_eps / 4
  double eta = 0.1;
  OracleMode mode = OracleMode::Exact;
  long long dataset_size = 20000;
  long long samples_per_call = 1000000;
  int slab_count = 200;
  int calibration_phases = 4;
  long long pca_dim = 0;  // 0: keep the ambient dimension
  std::uint64_t master_seed = 7;
  int eval_samples = 2000;
  ConstantSet constants;
};

// Parses and validates a JSON document. Unknown keys, wrong types,
// non-positive constants and unknown modes raise FormatError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
// Canonical JSON (sorted keys, every field) for manifests and logs.
std::string config_to_json(const ExperimentConfig& config);

std::string to_string(OracleMode mode);

AnalyticManifold build_manifold(const ManifoldSpec& spec);
// Bounds of the ground-truth manifold with the config overrides applied.
GeometricBounds effective_bounds(const ExperimentConfig& config, const AnalyticManifold& m);

}  // namespace mfit
