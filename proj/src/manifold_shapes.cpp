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

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mfit/errors.hpp"
#include "mfit/quadrature.hpp"
#include "shapes.hpp"

namespace mfit::detail {

void normalize_nodes(std::vector<ProjectionNode>& nodes) {
  std::vector<double> lw;
  lw.reserve(nodes.size());
  for (const auto& n : nodes) lw.push_back(n.log_weight);
  const double total = log_sum_exp(lw);
  for (auto& n : nodes) n.log_weight -= total;
}

std::vector<ProjectionNode> theta_nodes(double amplitude, double exponent, double width,
                                        int order) {
  if (amplitude <= 0.0) return {{0.0, 0.0}};
  const GaussRule& rule = gauss_legendre(order);
  std::vector<ProjectionNode> nodes;
  for (const auto& [a, b] : graded_panels(0.0, 0.0, std::numbers::pi, width)) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double theta = mid + half * rule.nodes[k];
      const double s = std::sin(theta);
      if (s <= 0.0) continue;
      nodes.push_back({amplitude * std::cos(theta),
                       std::log(rule.weights[k] * half) + exponent * std::log(s)});
    }
  }
  normalize_nodes(nodes);
  return nodes;
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// ---------------------------------------------------------------------------
// Round sphere of radius rho and dimension d in R^{d+1}.

class SphereShape final : public Shape {
 public:
  SphereShape(double radius, int d) : rho_(radius), d_(d) {
    if (!(radius > 0.0) || d < 1) throw ContractError("sphere: need radius > 0 and d >= 1");
  }

  ManifoldKind kind() const override { return d_ == 1 ? ManifoldKind::Circle : ManifoldKind::Sphere; }
  int dim() const override { return d_; }
  int space_dim() const override { return d_ + 1; }

  Vec closest(const Vec& x) const override {
    const double len = x.norm();
    if (len == 0.0) return rho_ * Vec::Unit(d_ + 1, 0);
    return rho_ * x / len;
  }
  Mat tangent(const Vec& p) const override {
    return Subspace::span_of(p).orthogonal_complement().basis();
  }
  std::vector<Vec> second_form(const Vec& p) const override {
    std::vector<Vec> out(static_cast<std::size_t>(d_ * d_), Vec::Zero(d_ + 1));
    const Vec inward = -closest(p) / (rho_ * rho_);
    for (int i = 0; i < d_; ++i) out[static_cast<std::size_t>(i * d_ + i)] = inward;
    return out;
  }
  std::vector<Vec> sample(int count, std::mt19937_64& rng) const override {
    std::normal_distribution<double> gauss;
    std::vector<Vec> out;
    out.reserve(static_cast<std::size_t>(count));
    while (static_cast<int>(out.size()) < count) {
      Vec g(d_ + 1);
      for (int i = 0; i <= d_; ++i) g(i) = gauss(rng);
      const double len = g.norm();
      if (len > 1e-12) out.push_back(rho_ * g / len);
    }
    return out;
  }
  double volume() const override { return (d_ + 1) * omega_d(d_ + 1) * std::pow(rho_, d_); }
  std::vector<Vec> grid(int per_dim) const override {
    std::vector<Vec> out;
    if (d_ == 1) {
      for (int k = 0; k < per_dim; ++k) {
        const double a = kTwoPi * k / per_dim;
        Vec v(2);
        v << rho_ * std::cos(a), rho_ * std::sin(a);
        out.push_back(v);
      }
      return out;
    }
    if (d_ == 2) {
      // Fibonacci lattice.
      const int m = per_dim * per_dim;
      const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
      for (int k = 0; k < m; ++k) {
        const double z = 1.0 - 2.0 * (k + 0.5) / m;
        const double r = std::sqrt(1.0 - z * z);
        Vec v(3);
        v << r * std::cos(golden * k), r * std::sin(golden * k), z;
        out.push_back(rho_ * v);
      }
      return out;
    }
    std::mt19937_64 rng(0x5eedULL);
    long m = 1;
    for (int i = 0; i < std::min(d_, 3); ++i) m *= per_dim;
    return sample(static_cast<int>(m), rng);
  }
  std::optional<double> support(const Vec& b) const override { return rho_ * b.norm(); }
  Vec support_point(const Vec& b) const override { return closest(b); }
  std::vector<ProjectionNode> projection_nodes(const Vec& b, double width,
                                               int order) const override {
    return theta_nodes(rho_ * b.norm(), d_ - 1, width, order);
  }
  double support_curvature(const Vec& b) const override { return rho_ * b.norm(); }
  double reach() const override { return rho_; }
  double exposure_radius() const override { return rho_; }
  double lambda() const override { return 1.0 / (rho_ * rho_); }

 private:
  double rho_;
  int d_;
};

// ---------------------------------------------------------------------------
// Flat d-disc of radius rho in R^d.

class FlatDiscShape final : public Shape {
 public:
  FlatDiscShape(double radius, int d) : rho_(radius), d_(d) {
    if (!(radius > 0.0) || d < 1) throw ContractError("flat disc: need radius > 0 and d >= 1");
  }
  ManifoldKind kind() const override { return ManifoldKind::FlatDisc; }
  int dim() const override { return d_; }
  int space_dim() const override { return d_; }
  Vec closest(const Vec& x) const override {
    const double len = x.norm();
    return len <= rho_ ? x : Vec(rho_ * x / len);
  }
  Mat tangent(const Vec&) const override { return Mat::Identity(d_, d_); }
  std::vector<Vec> second_form(const Vec&) const override {
    return std::vector<Vec>(static_cast<std::size_t>(d_ * d_), Vec::Zero(d_));
  }
  std::vector<Vec> sample(int count, std::mt19937_64& rng) const override {
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Vec> out;
    while (static_cast<int>(out.size()) < count) {
      Vec g(d_);
      for (int i = 0; i < d_; ++i) g(i) = gauss(rng);
      const double len = g.norm();
      if (len < 1e-12) continue;
      out.push_back(rho_ * std::pow(unif(rng), 1.0 / d_) * g / len);
    }
    return out;
  }
  double volume() const override { return omega_d(d_) * std::pow(rho_, d_); }
  std::vector<Vec> grid(int per_dim) const override {
    std::vector<Vec> out;
    std::vector<int> idx(static_cast<std::size_t>(d_), 0);
    while (true) {
      Vec v(d_);
      for (int i = 0; i < d_; ++i) {
        v(i) = per_dim > 1 ? -rho_ + 2.0 * rho_ * idx[static_cast<std::size_t>(i)] / (per_dim - 1) : 0.0;
      }
      if (v.norm() <= rho_) out.push_back(v);
      int k = 0;
      while (k < d_ && ++idx[static_cast<std::size_t>(k)] == per_dim) idx[static_cast<std::size_t>(k++)] = 0;
      if (k == d_) break;
    }
    return out;
  }
  std::optional<double> support(const Vec& b) const override { return rho_ * b.norm(); }
  Vec support_point(const Vec& b) const override {
    const double len = b.norm();
    return len == 0.0 ? Vec::Zero(d_) : Vec(rho_ * b / len);
  }
  std::vector<ProjectionNode> projection_nodes(const Vec& b, double width,
                                               int order) const override {
    return theta_nodes(rho_ * b.norm(), d_, width, order);
  }
  double support_curvature(const Vec& b) const override { return rho_ * b.norm(); }
  double reach() const override { return kInf; }
  double exposure_radius() const override { return kInf; }
  double lambda() const override { return 0.0; }

 private:
  double rho_;
  int d_;
};

// ---------------------------------------------------------------------------
// Shapes given by a periodic parametrization x(u), u in a box.

class ParamShape : public Shape {
 public:
  Vec closest(const Vec& x) const override { return at(closest_param(x)); }

  Mat tangent(const Vec& p) const override { return local(param_of(p)).q; }

  std::vector<Vec> second_form(const Vec& p) const override {
    return local(param_of(p)).second;
  }

  std::vector<Vec> sample(int count, std::mt19937_64& rng) const override {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Vec> out;
    out.reserve(static_cast<std::size_t>(count));
    Vec u(dim());
    while (static_cast<int>(out.size()) < count) {
      for (int i = 0; i < dim(); ++i) u(i) = lo_(i) + (hi_(i) - lo_(i)) * unif(rng);
      if (unif(rng) * area_max_ <= area(u)) out.push_back(at(u));
    }
    return out;
  }

  double volume() const override { return volume_; }

  std::vector<Vec> grid(int per_dim) const override {
    std::vector<Vec> out;
    for (const Vec& u : param_grid(per_dim)) out.push_back(at(u));
    return out;
  }

  std::optional<double> support(const Vec&) const override { return std::nullopt; }
  Vec support_point(const Vec& b) const override { return at(argmax(b)); }

  std::vector<ProjectionNode> projection_nodes(const Vec& b, double width,
                                               int order) const override {
    const int d = dim();
    const Vec center = argmax(b);
    const GaussRule& rule = gauss_legendre(order);
    std::vector<std::vector<std::pair<double, double>>> axis(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
      const double half = 0.5 * (hi_(i) - lo_(i));
      const double w = std::min(width > 0.0 ? width : half, half);
      for (const auto& [a, c] : graded_panels(center(i), center(i) - half, center(i) + half, w)) {
        const double h = 0.5 * (c - a);
        const double m = 0.5 * (a + c);
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
          axis[static_cast<std::size_t>(i)].emplace_back(m + h * rule.nodes[k],
                                                         std::log(rule.weights[k] * h));
        }
      }
    }
    std::vector<ProjectionNode> nodes;
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    Vec u(d);
    while (true) {
      double lw = 0.0;
      for (int i = 0; i < d; ++i) {
        const auto& node = axis[static_cast<std::size_t>(i)][idx[static_cast<std::size_t>(i)]];
        u(i) = node.first;
        lw += node.second;
      }
      const double a = area(u);
      if (a > 0.0) nodes.push_back({b.dot(at(u)), lw + std::log(a)});
      int k = 0;
      while (k < d && ++idx[static_cast<std::size_t>(k)] == axis[static_cast<std::size_t>(k)].size()) {
        idx[static_cast<std::size_t>(k++)] = 0;
      }
      if (k == d) break;
    }
    normalize_nodes(nodes);
    return nodes;
  }

  double support_curvature(const Vec& b) const override {
    const Vec u = argmax(b);
    const std::vector<Vec> h = hess(u);
    const int d = dim();
    Mat m(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) m(i, j) = -b.dot(h[static_cast<std::size_t>(i * d + j)]);
    }
    Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (m + m.transpose()));
    return std::max(0.0, eig.eigenvalues().maxCoeff());
  }

  double lambda() const override { return lambda_; }

 protected:
  virtual Vec at(const Vec& u) const = 0;
  virtual Mat jac(const Vec& u) const = 0;
  virtual Vec param_of(const Vec& p) const = 0;

  // Call at the end of every subclass constructor.
  void finish_setup(Vec lo, Vec hi, int grid_per_dim, int volume_per_dim) {
    lo_ = std::move(lo);
    hi_ = std::move(hi);
    grid_params_ = param_grid(grid_per_dim);
    area_max_ = 0.0;
    for (const Vec& u : grid_params_) {
      grid_points_.push_back(at(u));
      area_max_ = std::max(area_max_, area(u));
    }
    area_max_ *= 1.05;
    volume_ = 0.0;
    double cell = 1.0;
    for (int i = 0; i < dim(); ++i) cell *= (hi_(i) - lo_(i)) / volume_per_dim;
    for (const Vec& u : param_grid(volume_per_dim)) volume_ += area(u) * cell;
    lambda_ = estimate_lambda(grid_per_dim);
  }

  Vec wrap(Vec u) const {
    for (int i = 0; i < dim(); ++i) {
      const double period = hi_(i) - lo_(i);
      u(i) = lo_(i) + std::fmod(std::fmod(u(i) - lo_(i), period) + period, period);
    }
    return u;
  }

  Vec closest_param(const Vec& x) const {
    std::size_t best = 0;
    double best_d = kInf;
    for (std::size_t k = 0; k < grid_points_.size(); ++k) {
      const double dist = (grid_points_[k] - x).squaredNorm();
      if (dist < best_d) {
        best_d = dist;
        best = k;
      }
    }
    Vec u = grid_params_[best];
    const int d = dim();
    for (int it = 0; it < 60; ++it) {
      const Vec r = at(u) - x;
      const Mat j = jac(u);
      const Vec g = j.transpose() * r;
      Mat h = j.transpose() * j;
      const std::vector<Vec> second = hess(u);
      Mat full = h;
      for (int a = 0; a < d; ++a) {
        for (int c = 0; c < d; ++c) full(a, c) += r.dot(second[static_cast<std::size_t>(a * d + c)]);
      }
      Eigen::LDLT<Mat> ldlt(full);
      Vec step;
      if (ldlt.info() == Eigen::Success && ldlt.isPositive() && ldlt.vectorD().minCoeff() > 0.0) {
        step = -ldlt.solve(g);
      } else {
        step = -h.ldlt().solve(g);
      }
      // Backtrack on the squared distance.
      double t = 1.0;
      const double f0 = r.squaredNorm();
      Vec next = wrap(u + step);
      while (t > 1e-6 && (at(next) - x).squaredNorm() > f0) {
        t *= 0.5;
        next = wrap(u + t * step);
      }
      u = next;
      if (t * step.norm() < 1e-15) break;
    }
    return u;
  }

  std::vector<Vec> hess(const Vec& u) const {
    const int d = dim();
    const double h = 1e-5;
    std::vector<Vec> out(static_cast<std::size_t>(d * d));
    for (int j = 0; j < d; ++j) {
      Vec up = u;
      Vec um = u;
      up(j) += h;
      um(j) -= h;
      const Mat diff = (jac(up) - jac(um)) / (2.0 * h);
      for (int i = 0; i < d; ++i) out[static_cast<std::size_t>(i * d + j)] = diff.col(i);
    }
    // Symmetrize.
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) {
        const Vec avg = 0.5 * (out[static_cast<std::size_t>(i * d + j)] + out[static_cast<std::size_t>(j * d + i)]);
        out[static_cast<std::size_t>(i * d + j)] = avg;
        out[static_cast<std::size_t>(j * d + i)] = avg;
      }
    }
    return out;
  }

  double area(const Vec& u) const {
    const Mat j = jac(u);
    return std::sqrt(std::max(0.0, (j.transpose() * j).determinant()));
  }

  Vec argmax(const Vec& b) const {
    std::size_t best = 0;
    double best_v = -kInf;
    for (std::size_t k = 0; k < grid_points_.size(); ++k) {
      const double v = b.dot(grid_points_[k]);
      if (v > best_v) {
        best_v = v;
        best = k;
      }
    }
    Vec u = grid_params_[best];
    const int d = dim();
    for (int it = 0; it < 60; ++it) {
      const Mat j = jac(u);
      const Vec g = j.transpose() * b;
      const std::vector<Vec> second = hess(u);
      Mat h(d, d);
      for (int a = 0; a < d; ++a) {
        for (int c = 0; c < d; ++c) h(a, c) = -b.dot(second[static_cast<std::size_t>(a * d + c)]);
      }
      Eigen::LDLT<Mat> ldlt(h);
      Vec step;
      if (ldlt.info() == Eigen::Success && ldlt.isPositive() && ldlt.vectorD().minCoeff() > 1e-14) {
        step = ldlt.solve(g);
      } else {
        step = 1e-2 * g;
      }
      double t = 1.0;
      const double f0 = b.dot(at(u));
      Vec next = wrap(u + step);
      while (t > 1e-6 && b.dot(at(next)) < f0) {
        t *= 0.5;
        next = wrap(u + t * step);
      }
      if (b.dot(at(next)) < f0) break;
      u = next;
      if (t * step.norm() < 1e-15) break;
    }
    return u;
  }

 private:
  struct Local {
    Mat q;
    std::vector<Vec> second;
  };

  Local local(const Vec& u) const {
    const int d = dim();
    const Mat j = jac(u);
    Eigen::SelfAdjointEigenSolver<Mat> eig(j.transpose() * j);
    if (eig.eigenvalues().minCoeff() <= 0.0) {
      throw ContractError("parametrization is singular at this point");
    }
    const Mat m = eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                  eig.eigenvectors().transpose();
    Local out;
    out.q = j * m;
    const std::vector<Vec> xij = hess(u);
    std::vector<Vec> normal_part;
    for (const Vec& v : xij) normal_part.push_back(v - out.q * (out.q.transpose() * v));
    out.second.assign(static_cast<std::size_t>(d * d), Vec::Zero(space_dim()));
    for (int a = 0; a < d; ++a) {
      for (int c = 0; c < d; ++c) {
        Vec acc = Vec::Zero(space_dim());
        for (int i = 0; i < d; ++i) {
          for (int k = 0; k < d; ++k) acc += m(i, a) * m(k, c) * normal_part[static_cast<std::size_t>(i * d + k)];
        }
        out.second[static_cast<std::size_t>(a * d + c)] = acc;
      }
    }
    return out;
  }

  std::vector<Vec> param_grid(int per_dim) const {
    const int d = dim();
    std::vector<Vec> out;
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    while (true) {
      Vec u(d);
      for (int i = 0; i < d; ++i) {
        u(i) = lo_(i) + (hi_(i) - lo_(i)) * idx[static_cast<std::size_t>(i)] / per_dim;
      }
      out.push_back(u);
      int k = 0;
      while (k < d && ++idx[static_cast<std::size_t>(k)] == per_dim) idx[static_cast<std::size_t>(k++)] = 0;
      if (k == d) break;
    }
    return out;
  }

  // Largest difference quotient |II_p(xi,xi) - II_q(P_q xi, P_q xi)| / |p - q|
  // over neighbouring grid points, floored at reach^-2.
  double estimate_lambda(int per_dim) const {
    const int d = dim();
    double best = 0.0;
    for (const Vec& u : param_grid(per_dim)) {
      const Local lp = local(u);
      const Vec p = at(u);
      for (int axis = 0; axis < d; ++axis) {
        Vec v = u;
        v(axis) += (hi_(axis) - lo_(axis)) / per_dim;
        v = wrap(v);
        const Local lq = local(v);
        const Vec q = at(v);
        const double dist = (p - q).norm();
        if (dist == 0.0) continue;
        std::vector<Vec> dirs;
        for (int i = 0; i < d; ++i) {
          Vec a = Vec::Zero(d);
          a(i) = 1.0;
          dirs.push_back(a);
          for (int k = i + 1; k < d; ++k) {
            Vec s = Vec::Zero(d);
            s(i) = s(k) = std::sqrt(0.5);
            dirs.push_back(s);
            s(k) = -s(k);
            dirs.push_back(s);
          }
        }
        for (const Vec& a : dirs) {
          const Vec xi = lp.q * a;
          const Vec bq = lq.q.transpose() * xi;
          Vec iip = Vec::Zero(space_dim());
          Vec iiq = Vec::Zero(space_dim());
          for (int i = 0; i < d; ++i) {
            for (int k = 0; k < d; ++k) {
              iip += a(i) * a(k) * lp.second[static_cast<std::size_t>(i * d + k)];
              iiq += bq(i) * bq(k) * lq.second[static_cast<std::size_t>(i * d + k)];
            }
          }
          best = std::max(best, (iip - iiq).norm() / dist);
        }
      }
    }
    const double t = reach();
    return std::max(best, 1.0 / (t * t));
  }

  Vec lo_, hi_;
  std::vector<Vec> grid_params_;
  std::vector<Vec> grid_points_;
  double area_max_ = 0.0;
  double volume_ = 0.0;
  double lambda_ = 0.0;
};

class EllipseShape final : public ParamShape {
 public:
  EllipseShape(double a, double b) : a_(a), b_(b) {
    if (!(a > 0.0 && b > 0.0)) throw ContractError("ellipse: semiaxes must be positive");
    Vec lo(1), hi(1);
    lo << 0.0;
    hi << kTwoPi;
    finish_setup(lo, hi, 2048, 4096);
  }
  ManifoldKind kind() const override {
    return a_ == b_ ? ManifoldKind::Circle : ManifoldKind::Ellipse;
  }
  int dim() const override { return 1; }
  int space_dim() const override { return 2; }
  std::optional<double> support(const Vec& b) const override {
    return std::hypot(a_ * b(0), b_ * b(1));
  }
  Vec support_point(const Vec& b) const override {
    const double s = std::hypot(a_ * b(0), b_ * b(1));
    if (s == 0.0) return at(Vec::Zero(1));
    Vec p(2);
    p << a_ * a_ * b(0) / s, b_ * b_ * b(1) / s;
    return p;
  }
  double reach() const override {
    const double lo = std::min(a_, b_);
    return lo * lo / std::max(a_, b_);
  }
  double exposure_radius() const override {
    const double hi = std::max(a_, b_);
    return hi * hi / std::min(a_, b_);
  }

 protected:
  Vec at(const Vec& u) const override {
    Vec p(2);
    p << a_ * std::cos(u(0)), b_ * std::sin(u(0));
    return p;
  }
  Mat jac(const Vec& u) const override {
    Mat j(2, 1);
    j << -a_ * std::sin(u(0)), b_ * std::cos(u(0));
    return j;
  }
  Vec param_of(const Vec& p) const override {
    Vec u(1);
    u << std::atan2(p(1) / b_, p(0) / a_);
    return wrap(u);
  }

 private:
  double a_, b_;
};

class TorusShape final : public ParamShape {
 public:
  TorusShape(double major, double minor) : big_(major), small_(minor) {
    if (!(minor > 0.0 && major > minor)) throw ContractError("torus: need major > minor > 0");
    Vec lo = Vec::Zero(2);
    Vec hi = Vec::Constant(2, kTwoPi);
    finish_setup(lo, hi, 96, 256);
  }
  ManifoldKind kind() const override { return ManifoldKind::Torus; }
  int dim() const override { return 2; }
  int space_dim() const override { return 3; }
  Vec closest(const Vec& x) const override { return at(param_of(x)); }
  std::optional<double> support(const Vec& b) const override {
    return big_ * std::hypot(b(0), b(1)) + small_ * b.norm();
  }
  Vec support_point(const Vec& b) const override {
    const double ring = std::hypot(b(0), b(1));
    Vec c = Vec::Zero(3);
    if (ring > 0.0) {
      c(0) = big_ * b(0) / ring;
      c(1) = big_ * b(1) / ring;
    } else {
      c(0) = big_;
    }
    const double len = b.norm();
    return len > 0.0 ? Vec(c + small_ * b / len) : c;
  }
  double reach() const override { return std::min(small_, big_ - small_); }
  double exposure_radius() const override { return kInf; }

 protected:
  Vec at(const Vec& u) const override {
    const double ring = big_ + small_ * std::cos(u(1));
    Vec p(3);
    p << ring * std::cos(u(0)), ring * std::sin(u(0)), small_ * std::sin(u(1));
    return p;
  }
  Mat jac(const Vec& u) const override {
    const double ring = big_ + small_ * std::cos(u(1));
    Mat j(3, 2);
    j << -ring * std::sin(u(0)), -small_ * std::sin(u(1)) * std::cos(u(0)),
        ring * std::cos(u(0)), -small_ * std::sin(u(1)) * std::sin(u(0)),
        0.0, small_ * std::cos(u(1));
    return j;
  }
  Vec param_of(const Vec& p) const override {
    Vec u(2);
    u << std::atan2(p(1), p(0)), std::atan2(p(2), std::hypot(p(0), p(1)) - big_);
    return wrap(u);
  }

 private:
  double big_, small_;
};

}  // namespace

std::shared_ptr<const Shape> make_sphere_shape(double radius, int d) {
  return std::make_shared<SphereShape>(radius, d);
}
std::shared_ptr<const Shape> make_ellipse_shape(double a, double b) {
  return std::make_shared<EllipseShape>(a, b);
}
std::shared_ptr<const Shape> make_torus_shape(double major, double minor) {
  return std::make_shared<TorusShape>(major, minor);
}
std::shared_ptr<const Shape> make_flat_disc_shape(double radius, int d) {
  return std::make_shared<FlatDiscShape>(radius, d);
}

}  // namespace mfit::detail
