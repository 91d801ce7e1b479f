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

#include "mfit/cone.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "mfit/errors.hpp"

namespace mfit {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kAngleTol = 1e-12;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0.0 ? a + kTwoPi : a;
}

Vec unit_at(double angle) {
  Vec v(2);
  v << std::cos(angle), std::sin(angle);
  return v;
}

// A planar closed convex cone: {0}, the whole plane, a line (two opposite
// zero-width arcs) or a single arc of width at most pi.
struct Arc {
  double start;
  double width;
};

struct PlanarCone {
  bool whole = false;
  std::vector<Arc> arcs;
  bool zero() const { return !whole && arcs.empty(); }
};

PlanarCone planar_hull(const Mat& g) {
  std::vector<double> angles;
  const double scale = g.cols() > 0 ? g.colwise().norm().maxCoeff() : 0.0;
  for (Eigen::Index i = 0; i < g.cols(); ++i) {
    if (g.col(i).norm() <= 1e-14 * scale || scale == 0.0) continue;
    angles.push_back(wrap_angle(std::atan2(g(1, i), g(0, i))));
  }
  PlanarCone out;
  if (angles.empty()) return out;
  std::sort(angles.begin(), angles.end());
  std::vector<double> uniq;
  for (double a : angles) {
    if (uniq.empty() || a - uniq.back() > kAngleTol) uniq.push_back(a);
  }
  if (uniq.size() > 1 && uniq.front() + kTwoPi - uniq.back() <= kAngleTol) uniq.pop_back();
  if (uniq.size() == 1) {
    out.arcs.push_back({uniq[0], 0.0});
    return out;
  }
  const std::size_t m = uniq.size();
  double best_gap = -1.0;
  std::size_t best = 0;
  for (std::size_t k = 0; k < m; ++k) {
    const double next = k + 1 < m ? uniq[k + 1] : uniq[0] + kTwoPi;
    const double gap = next - uniq[k];
    if (gap > best_gap) {
      best_gap = gap;
      best = k;
    }
  }
  const double after = uniq[(best + 1) % m];
  if (best_gap > std::numbers::pi + 1e-10) {
    out.arcs.push_back({after, kTwoPi - best_gap});
  } else if (best_gap >= std::numbers::pi - 1e-10) {
    if (m == 2) {
      out.arcs.push_back({uniq[0], 0.0});
      out.arcs.push_back({uniq[1], 0.0});
    } else {
      out.arcs.push_back({after, std::numbers::pi});
    }
  } else {
    out.whole = true;
  }
  return out;
}

PlanarCone planar_polar(const PlanarCone& c) {
  PlanarCone out;
  if (c.whole) return out;
  if (c.zero()) {
    out.whole = true;
    return out;
  }
  if (c.arcs.size() == 2) {
    out.arcs.push_back({wrap_angle(c.arcs[0].start + std::numbers::pi / 2), 0.0});
    out.arcs.push_back({wrap_angle(c.arcs[0].start + 3 * std::numbers::pi / 2), 0.0});
    return out;
  }
  const Arc& a = c.arcs[0];
  out.arcs.push_back({wrap_angle(a.start + a.width + std::numbers::pi / 2),
                      std::max(0.0, std::numbers::pi - a.width)});
  return out;
}

PlanarCone planar_form(const Cone& k) {
  if (k.form() == Cone::Form::Generated) return planar_hull(k.vectors());
  return planar_polar(planar_hull(k.vectors()));
}

std::vector<Vec> planar_samples(const PlanarCone& c, int count, double* resolution) {
  std::vector<Vec> out;
  *resolution = 0.0;
  if (c.zero()) return out;
  if (c.whole) {
    for (int i = 0; i < count; ++i) out.push_back(unit_at(kTwoPi * i / count));
    *resolution = 2.0 * std::sin(std::numbers::pi / count);
    return out;
  }
  double total = 0.0;
  for (const Arc& a : c.arcs) total += a.width;
  for (const Arc& a : c.arcs) {
    if (a.width <= 0.0 || total <= 0.0) {
      out.push_back(unit_at(a.start));
      continue;
    }
    const int m = std::max(2, static_cast<int>(std::lround(count * a.width / total)));
    for (int i = 0; i < m; ++i) out.push_back(unit_at(a.start + a.width * i / (m - 1)));
    *resolution = std::max(*resolution, 2.0 * std::sin(a.width / (2.0 * (m - 1))));
  }
  return out;
}

}  // namespace

Cone Cone::generated(Mat generators) {
  if (generators.rows() == 0) throw ContractError("cone: ambient dimension must be positive");
  const int n = static_cast<int>(generators.rows());
  return Cone(Form::Generated, std::move(generators), n);
}

Cone Cone::constrained(Mat normals, int ambient_dim) {
  if (ambient_dim <= 0) throw ContractError("cone: ambient dimension must be positive");
  if (normals.cols() > 0 && normals.rows() != ambient_dim) {
    throw ContractError("cone: constraint dimension mismatch");
  }
  if (normals.cols() == 0) normals.resize(ambient_dim, 0);
  return Cone(Form::Constrained, std::move(normals), ambient_dim);
}

Cone Cone::polar() const {
  return Cone(form_ == Form::Generated ? Form::Constrained : Form::Generated, vectors_,
              ambient_dim_);
}

bool Cone::contains(const Vec& x, double tol) const {
  const double scale = std::max(1.0, x.norm());
  if (vectors_.cols() == 0) {
    return form_ == Form::Constrained || x.norm() <= tol;
  }
  if (form_ == Form::Constrained) {
    for (Eigen::Index i = 0; i < vectors_.cols(); ++i) {
      const double len = vectors_.col(i).norm();
      if (len == 0.0) continue;
      if (vectors_.col(i).dot(x) / len > tol * scale) return false;
    }
    return true;
  }
  const Vec lambda = nnls(vectors_, x);
  return (vectors_ * lambda - x).norm() <= tol * scale;
}

Vec Cone::project(const Vec& x) const {
  if (x.size() != ambient_dim_) throw ContractError("cone: vector dimension mismatch");
  if (vectors_.cols() == 0) {
    return form_ == Form::Generated ? Vec::Zero(ambient_dim_) : x;
  }
  const Vec onto_hull = vectors_ * nnls(vectors_, x);
  return form_ == Form::Generated ? onto_hull : Vec(x - onto_hull);
}

double Cone::slice_distance(const Vec& x) const {
  Vec p = project(x);
  const double len = p.norm();
  if (len > 1.0) p /= len;
  return (x - p).norm();
}

bool Cone::is_zero() const {
  if (ambient_dim_ == 2) return planar_form(*this).zero();
  if (form_ == Form::Generated) {
    return vectors_.cols() == 0 || vectors_.cwiseAbs().maxCoeff() == 0.0;
  }
  if (vectors_.cols() == 0) return false;
  for (int k = 0; k < ambient_dim_; ++k) {
    for (double sign : {1.0, -1.0}) {
      const Vec e = sign * Vec::Unit(ambient_dim_, k);
      if ((vectors_ * nnls(vectors_, e) - e).norm() > 1e-10) return false;
    }
  }
  return true;
}

Cone Cone::to_generated() const {
  if (form_ == Form::Generated) return *this;
  if (ambient_dim_ != 2) {
    throw ContractError("cone: generator conversion is only available in the plane");
  }
  const PlanarCone c = planar_form(*this);
  std::vector<double> rays;
  if (c.whole) {
    rays = {0.0, kTwoPi / 3, 2 * kTwoPi / 3};
  } else {
    for (const Arc& a : c.arcs) {
      rays.push_back(a.start);
      if (a.width > 0.0) {
        if (a.width >= std::numbers::pi - 1e-10) rays.push_back(a.start + a.width / 2);
        rays.push_back(a.start + a.width);
      }
    }
  }
  Mat g(2, static_cast<Eigen::Index>(rays.size()));
  for (std::size_t i = 0; i < rays.size(); ++i) g.col(static_cast<Eigen::Index>(i)) = unit_at(rays[i]);
  return Cone(Form::Generated, std::move(g), 2);
}

std::vector<Vec> Cone::unit_samples(int count, std::uint64_t seed) const {
  if (count <= 0) throw ContractError("cone: sample count must be positive");
  if (ambient_dim_ == 2) {
    double resolution = 0.0;
    return planar_samples(planar_form(*this), count, &resolution);
  }
  std::vector<Vec> out;
  if (form_ == Form::Generated) {
    for (Eigen::Index i = 0; i < vectors_.cols(); ++i) {
      const double len = vectors_.col(i).norm();
      if (len > 0.0) out.push_back(vectors_.col(i) / len);
    }
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  const long max_tries = 400L * count;
  for (long t = 0; t < max_tries && static_cast<int>(out.size()) < count; ++t) {
    Vec v(ambient_dim_);
    for (int i = 0; i < ambient_dim_; ++i) v(i) = gauss(rng);
    v.normalize();
    if (contains(v, 1e-12)) out.push_back(v);
  }
  if (out.empty()) throw ContractError("cone: insufficient samples in the unit slice");
  return out;
}

ConeDistanceReport cone_hausdorff(const Cone& k1, const Cone& k2, int sample_count,
                                  std::uint64_t seed) {
  if (k1.ambient_dim() != k2.ambient_dim()) {
    throw ContractError("cone distance: dimension mismatch");
  }
  if (k1.is_zero() || k2.is_zero()) throw ContractError("cone distance: degenerate zero cone");
  ConeDistanceReport report;
  double res1 = std::nan("");
  double res2 = std::nan("");
  std::vector<Vec> s1;
  std::vector<Vec> s2;
  const Cone a = k1.ambient_dim() == 2 ? k1.to_generated() : k1;
  const Cone b = k2.ambient_dim() == 2 ? k2.to_generated() : k2;
  if (k1.ambient_dim() == 2) {
    s1 = planar_samples(planar_form(a), sample_count, &res1);
    s2 = planar_samples(planar_form(b), sample_count, &res2);
  } else {
    s1 = a.unit_samples(sample_count, seed);
    s2 = b.unit_samples(sample_count, seed + 1);
  }
  double worst = 0.0;
  for (const Vec& u : s1) worst = std::max(worst, b.slice_distance(u));
  for (const Vec& u : s2) worst = std::max(worst, a.slice_distance(u));
  report.estimate = std::min(worst, 2.0);
  report.resolution = std::max(res1, res2);
  report.sample_count = static_cast<int>(s1.size() + s2.size());
  return report;
}

std::pair<ConeDistanceReport, ConeDistanceReport> polar_cone_distance_pair(
    const Cone& k1, const Cone& k2, int sample_count, std::uint64_t seed) {
  return {cone_hausdorff(k1, k2, sample_count, seed),
          cone_hausdorff(k1.polar(), k2.polar(), sample_count, seed + 7)};
}

Cone normal_cone_at(std::span<const Vec> hull_points, const Vec& p) {
  if (hull_points.empty()) throw ContractError("normal_cone_at: empty hull");
  const int n = static_cast<int>(p.size());
  double scale = 0.0;
  double nearest = kInf;
  for (const Vec& x : hull_points) {
    scale = std::max(scale, (x - p).norm());
    nearest = std::min(nearest, (x - p).norm());
  }
  if (nearest > 1e-9 * std::max(1.0, scale)) {
    throw ContractError("normal_cone_at: p is not one of the hull points");
  }
  std::vector<Vec> cols;
  for (const Vec& x : hull_points) {
    if ((x - p).norm() > 1e-12 * std::max(1.0, scale)) cols.push_back(x - p);
  }
  if (cols.empty()) return Cone::constrained(Mat(n, 0), n);
  const Mat a = columns_of(cols);
  // p is extreme iff 0 is not a convex combination of the x_i - p.
  Mat aug(n + 1, a.cols());
  aug.topRows(n) = a / scale;
  aug.row(n).setOnes();
  Vec target = Vec::Zero(n + 1);
  target(n) = 1.0;
  const Vec lambda = nnls(aug, target);
  if ((aug * lambda - target).norm() <= 1e-10) {
    throw ContractError("normal_cone_at: not extreme");
  }
  Cone cone = Cone::constrained(a, n);
  return n == 2 ? cone.to_generated() : cone;
}

Vec nnls(const Mat& a, const Vec& b) {
  const Eigen::Index m = a.cols();
  Vec x = Vec::Zero(m);
  if (m == 0) return x;
  const double tol = 1e-13 * std::max(1.0, a.cwiseAbs().maxCoeff()) * std::max(1.0, b.norm()) *
                     static_cast<double>(std::max<Eigen::Index>(m, a.rows()));
  std::vector<bool> passive(static_cast<std::size_t>(m), false);
  Vec w = a.transpose() * (b - a * x);
  const int max_outer = static_cast<int>(3 * m + 30);
  for (int outer = 0; outer < max_outer; ++outer) {
    Eigen::Index t = -1;
    double best = tol;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && w(j) > best) {
        best = w(j);
        t = j;
      }
    }
    if (t < 0) break;
    passive[static_cast<std::size_t>(t)] = true;
    for (int inner = 0; inner < static_cast<int>(m) + 5; ++inner) {
      std::vector<Eigen::Index> idx;
      for (Eigen::Index j = 0; j < m; ++j) {
        if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
      }
      Mat ap(a.rows(), static_cast<Eigen::Index>(idx.size()));
      for (std::size_t k = 0; k < idx.size(); ++k) ap.col(static_cast<Eigen::Index>(k)) = a.col(idx[k]);
      const Vec zp = ap.colPivHouseholderQr().solve(b);
      Vec z = Vec::Zero(m);
      for (std::size_t k = 0; k < idx.size(); ++k) z(idx[k]) = zp(static_cast<Eigen::Index>(k));
      bool feasible = true;
      for (Eigen::Index j : idx) feasible = feasible && z(j) > 0.0;
      if (feasible) {
        x = z;
        break;
      }
      double alpha = 1.0;
      for (Eigen::Index j : idx) {
        if (z(j) <= 0.0) alpha = std::min(alpha, x(j) / (x(j) - z(j)));
      }
      x += alpha * (z - x);
      for (Eigen::Index j : idx) {
        if (x(j) <= 1e-15) {
          x(j) = 0.0;
          passive[static_cast<std::size_t>(j)] = false;
        }
      }
    }
    w = a.transpose() * (b - a * x);
  }
  return x;
}

}  // namespace mfit
