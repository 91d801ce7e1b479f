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
#include <vector>

#include "mfit/geometry.hpp"

namespace mfit {

struct ReconstructionNet;

// Greedy maximal subset with pairwise distances >= scale, scanned in input
// order. Every input point ends up within `scale` of the result.
std::vector<Vec> subnet(std::span<const Vec> points, double scale);
std::vector<Vec> subnet(const ReconstructionNet& net, double scale);

// Picks d candidates approximating an orthonormal tangent frame at `base`.
// Candidates are compared after the map x -> (x - base) / unit, so a good
// pick sits at distance `unit` from the base and is orthogonal to earlier
// picks. Ties go to the lowest index. Returns candidate indices.
std::vector<int> find_disc(const Vec& base, std::span<const Vec> candidates, int d,
                           double unit = 1.0);

// Orthonormal basis of span{x_k - base}.
Mat frame_from_points(const Vec& base, std::span<const Vec> points);

struct FineTuneResult {
  Mat frame;                      // n x d, orthonormal
  double residual = 0.0;          // sum of squared normal offsets
  double putative_residual = 0.0;
  bool degenerate = false;        // design matrix singular; putative frame kept
  bool improved = false;          // refined frame replaced the putative one
};

// Least-squares linear graph over the putative tangent plane through `base`:
// normal offsets w_k ~ G u_k where u_k are tangent coordinates. The refined
// frame is the orthonormalized span of frame + G. Needs >= 10 d samples.
FineTuneResult fine_tune_disc(const Vec& base, std::span<const Vec> samples, const Mat& frame);

struct DiscAtlas {
  int dim = 1;
  int ambient = 2;
  double radius = 0.0;
  std::vector<Vec> centers;
  std::vector<Mat> frames;       // n x d orthonormal tangent frames
  std::vector<Mat> normal_proj;  // I - frame frame^T

  std::size_t size() const { return centers.size(); }
  // Rebuilds normal_proj from frames and checks shapes.
  void finalize();
};

DiscAtlas make_atlas(std::vector<Vec> centers, std::vector<Mat> frames, double radius);

// Largest ||P_i - P_j||_F over disc pairs whose supports overlap.
double max_projector_gap(const DiscAtlas& atlas);

struct AtlasOptions {
  double subnet_c = 0.1;      // subnet scale is subnet_c * tau / d
  double radius_factor = 3.0; // disc radius in units of the subnet scale
  double C_frob = 2.0;        // projector gap bound C_frob d (2r / tau)
  bool fine_tune = true;
};

struct AtlasReport {
  double scale = 0.0;
  int discs = 0;
  int fine_tuned = 0;
  int degenerate = 0;
  int skipped = 0;            // fewer than 10 d local samples
  double max_projector_gap = 0.0;
  double projector_gap_bound = 0.0;
};

// Subnet, FindDisc on net neighbours, then least-squares refinement.
DiscAtlas build_atlas(std::span<const Vec> net_points, int d, double tau,
                      const AtlasOptions& options = {}, AtlasReport* report = nullptr);

}  // namespace mfit
