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


#include "mfit/atlas.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <sstream>

#include "mfit/errors.hpp"
#include "mfit/net.hpp"

namespace mfit {

std::vector<Vec> subnet(std::span<const Vec> points, double scale) {
  if (!(scale > 0.0)) throw ContractError("subnet: scale must be positive");
  if (points.empty()) throw ContractError("subnet: empty net");
  std::vector<Vec> out;
  for (const Vec& p : points) {
    bool separated = true;
    for (const Vec& q : out) {
      if ((p - q).norm() < scale) {
        separated = false;
        break;
      }
    }
    if (separated) out.push_back(p);
  }
  return out;
}

std::vector<Vec> subnet(const ReconstructionNet& net, double scale) {
  const std::vector<Vec> points = net.points();
  return subnet(points, scale);
}

std::vector<int> find_disc(const Vec& base, std::span<const Vec> candidates, int d,
                           double unit) {
  if (d < 1) throw ContractError("find_disc: d must be positive");
  if (static_cast<int>(candidates.size()) < d) {
    throw ContractError("find_disc: fewer candidates than the dimension");
  }
  if (!(unit > 0.0)) throw ContractError("find_disc: unit must be positive");

  std::vector<Vec> rel;
  rel.reserve(candidates.size());
  for (const Vec& c : candidates) {
    if (c.size() != base.size()) throw ContractError("find_disc: dimension mismatch");
    rel.push_back((c - base) / unit);
  }

  std::vector<int> picked;
  std::vector<Vec> dirs;
  for (int m = 0; m < d; ++m) {
    int best = -1;
    double best_score = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < rel.size(); ++k) {
      bool used = false;
      for (int j : picked) used = used || (j == static_cast<int>(k));
      if (used) continue;
      double score = std::abs(1.0 - rel[k].norm());
      for (const Vec& u : dirs) score = std::max(score, std::abs(u.dot(rel[k])));
      if (score < best_score) {
        best_score = score;
        best = static_cast<int>(k);
      }
    }
    if (best < 0) throw ContractError("find_disc: no admissible candidate");
    picked.push_back(best);
    const double len = rel[best].norm();
    if (len > 0.0) dirs.push_back(rel[best] / len);
  }
  return picked;
}

Mat frame_from_points(const Vec& base, std::span<const Vec> points) {
  Mat cols(base.size(), static_cast<Eigen::Index>(points.size()));
  for (std::size_t k = 0; k < points.size(); ++k) cols.col(k) = points[k] - base;
  Subspace s = Subspace::span_of(cols, 1e-10);
  if (s.dim() != static_cast<int>(points.size())) {
    throw ContractError("frame_from_points: selected points are affinely dependent");
  }
  return s.basis();
}

namespace {

double normal_residual(const Mat& frame, const Mat& q) {
  const Mat w = q - frame * (frame.transpose() * q);
  return w.squaredNorm();
}

}  // namespace

FineTuneResult fine_tune_disc(const Vec& base, std::span<const Vec> samples, const Mat& frame) {
  const int d = static_cast<int>(frame.cols());
  if (frame.rows() != base.size()) throw ContractError("fine_tune_disc: frame dimension mismatch");
  if (static_cast<int>(samples.size()) < 10 * d) {
    throw ContractError("fine_tune_disc: needs at least 10 d local samples");
  }
  Mat q(base.size(), static_cast<Eigen::Index>(samples.size()));
  for (std::size_t k = 0; k < samples.size(); ++k) q.col(k) = samples[k] - base;

  FineTuneResult out;
  out.frame = frame;
  out.putative_residual = normal_residual(frame, q);
  out.residual = out.putative_residual;

  const Mat u = frame.transpose() * q;
  const Mat w = q - frame * u;
  const Mat gram = u * u.transpose();
  Eigen::SelfAdjointEigenSolver<Mat> eig(gram);
  const double top = eig.eigenvalues().maxCoeff();
  if (!(top > 0.0) || eig.eigenvalues().minCoeff() <= 1e-12 * top) {
    out.degenerate = true;
    return out;
  }
  const Mat slope = w * u.transpose() * gram.inverse();
  const Mat tilted = frame + slope;
  Eigen::HouseholderQR<Mat> qr(tilted);
  const Mat refined = qr.householderQ() * Mat::Identity(tilted.rows(), d);
  const double r = normal_residual(refined, q);
  if (r <= out.putative_residual) {
    out.frame = refined;
    out.residual = r;
    out.improved = true;
  }
  return out;
}

void DiscAtlas::finalize() {
  if (centers.size() != frames.size()) throw ContractError("DiscAtlas: centers/frames mismatch");
  if (centers.empty()) throw ContractError("DiscAtlas: no discs");
  if (!(radius > 0.0)) throw ContractError("DiscAtlas: radius must be positive");
  ambient = static_cast<int>(centers.front().size());
  dim = static_cast<int>(frames.front().cols());
  normal_proj.clear();
  const Mat eye = Mat::Identity(ambient, ambient);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const Mat& f = frames[i];
    if (centers[i].size() != ambient || f.rows() != ambient || f.cols() != dim) {
      throw ContractError("DiscAtlas: inconsistent disc shapes");
    }
    if ((f.transpose() * f - Mat::Identity(dim, dim)).norm() > 1e-8) {
      throw ContractError("DiscAtlas: frame is not orthonormal");
    }
    normal_proj.push_back(eye - f * f.transpose());
  }
}

DiscAtlas make_atlas(std::vector<Vec> centers, std::vector<Mat> frames, double radius) {
  DiscAtlas atlas;
  atlas.centers = std::move(centers);
  atlas.frames = std::move(frames);
  atlas.radius = radius;
  atlas.finalize();
  return atlas;
}

double max_projector_gap(const DiscAtlas& atlas) {
  double worst = 0.0;
  for (std::size_t i = 0; i < atlas.size(); ++i) {
    for (std::size_t j = i + 1; j < atlas.size(); ++j) {
      if ((atlas.centers[i] - atlas.centers[j]).norm() >= 2.0 * atlas.radius) continue;
      worst = std::max(worst, (atlas.normal_proj[i] - atlas.normal_proj[j]).norm());
    }
  }
  return worst;
}

DiscAtlas build_atlas(std::span<const Vec> net_points, int d, double tau,
                      const AtlasOptions& options, AtlasReport* report) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ContractError("build_atlas: tau must be finite");
  if (!(options.subnet_c > 0.0) || !(options.radius_factor > 0.0)) {
    throw ContractError("build_atlas: constants must be positive");
  }
  AtlasReport rep;
  rep.scale = options.subnet_c * tau / d;
  const double radius = options.radius_factor * rep.scale;
  std::vector<Vec> centers = subnet(net_points, rep.scale);

  std::vector<Mat> frames;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const Vec& p = centers[i];
    std::vector<Vec> near;
    for (const Vec& x : net_points) {
      const double dist = (x - p).norm();
      if (dist > 1e-12 && dist <= 2.0 * radius) near.push_back(x);
    }
    if (static_cast<int>(near.size()) < d) {
      std::ostringstream msg;
      msg << "build_atlas: disc " << i << " has " << near.size()
          << " net neighbours within " << 2.0 * radius << ", need " << d;
      throw ContractError(msg.str());
    }
    const std::vector<int> pick = find_disc(p, near, d, radius);
    std::vector<Vec> chosen;
    for (int k : pick) chosen.push_back(near[k]);
    Mat frame = frame_from_points(p, chosen);

    if (options.fine_tune) {
      if (static_cast<int>(near.size()) >= 10 * d) {
        FineTuneResult ft = fine_tune_disc(p, near, frame);
        if (ft.degenerate) ++rep.degenerate;
        if (ft.improved) ++rep.fine_tuned;
        frame = std::move(ft.frame);
      } else {
        ++rep.skipped;
      }
    }
    frames.push_back(std::move(frame));
  }
  DiscAtlas atlas = make_atlas(std::move(centers), std::move(frames), radius);
  rep.discs = static_cast<int>(atlas.size());
  rep.max_projector_gap = max_projector_gap(atlas);
  rep.projector_gap_bound = options.C_frob * d * 2.0 * radius / tau;
  if (report) *report = rep;
  return atlas;
}

}  // namespace mfit
