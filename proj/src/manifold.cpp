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

#include "mfit/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mfit/errors.hpp"
#include "shapes.hpp"

namespace mfit {

std::string to_string(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::Circle: return "circle";
    case ManifoldKind::Ellipse: return "ellipse";
    case ManifoldKind::Sphere: return "sphere";
    case ManifoldKind::Torus: return "torus";
    case ManifoldKind::FlatDisc: return "flat_disc";
    case ManifoldKind::SphereProjected: return "sphere_projected";
  }
  return "unknown";
}

namespace {

// Image of a base manifold under x -> radial projection, onto the sphere
// |y - center| = radius, of the orthogonal projection of x onto a hyperplane.
class ProjectedShape final : public Shape {
 public:
  ProjectedShape(AnalyticManifold base, Vec normal, Vec plane_point, Vec center, double radius,
                 double reach, double lambda)
      : base_(std::move(base)),
        nu_(std::move(normal)),
        h0_(std::move(plane_point)),
        c_(std::move(center)),
        radius_(radius),
        reach_(reach),
        lambda_(lambda) {
    for (const Vec& q : base_.grid_points(256)) jac_max_ = std::max(jac_max_, area_factor(q));
    jac_max_ *= 1.05;
    std::mt19937_64 rng(0xC0FFEEULL);
    double acc = 0.0;
    const int m = 20000;
    for (const Vec& q : base_.uniform_sample(m, rng())) acc += area_factor(q);
    volume_ = base_.volume() * acc / m;
  }

  ManifoldKind kind() const override { return ManifoldKind::SphereProjected; }
  int dim() const override { return base_.dim(); }
  int space_dim() const override { return base_.ambient_dim(); }

  Vec closest(const Vec& x) const override { return map(closest_base(x)); }

  Mat tangent(const Vec& p) const override {
    const Vec q = preimage(p);
    return Subspace::span_of(pushed_tangent(q)).basis();
  }

  // Second differences along curves closest(p +- h xi), polarized.
  std::vector<Vec> second_form(const Vec& p) const override {
    const Mat q = tangent(p);
    const int d = dim();
    const double h = 1e-3;
    auto ii = [&](const Vec& xi) {
      const Vec acc = closest(p + h * xi) + closest(p - h * xi) - 2.0 * p;
      return Vec((acc - q * (q.transpose() * acc)) / (h * h));
    };
    std::vector<Vec> out(static_cast<std::size_t>(d * d));
    for (int i = 0; i < d; ++i) {
      out[static_cast<std::size_t>(i * d + i)] = ii(q.col(i));
      for (int j = i + 1; j < d; ++j) {
        const Vec v = 0.25 * (ii(q.col(i) + q.col(j)) - ii(q.col(i) - q.col(j)));
        out[static_cast<std::size_t>(i * d + j)] = v;
        out[static_cast<std::size_t>(j * d + i)] = v;
      }
    }
    return out;
  }

  std::vector<Vec> sample(int count, std::mt19937_64& rng) const override {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Vec> out;
    while (static_cast<int>(out.size()) < count) {
      const int batch = std::max(16, count - static_cast<int>(out.size()));
      for (const Vec& q : base_.uniform_sample(batch, rng())) {
        if (static_cast<int>(out.size()) == count) break;
        if (unif(rng) * jac_max_ <= area_factor(q)) out.push_back(map(q));
      }
    }
    return out;
  }

  double volume() const override { return volume_; }

  std::vector<Vec> grid(int per_dim) const override {
    std::vector<Vec> out;
    for (const Vec& q : base_.grid_points(per_dim)) out.push_back(map(q));
    return out;
  }

  std::optional<double> support(const Vec&) const override { return std::nullopt; }

  Vec support_point(const Vec& b) const override {
    Vec best;
    double best_v = -kInf;
    for (const Vec& q : base_.grid_points(512)) {
      const double v = b.dot(map(q));
      if (v > best_v) {
        best_v = v;
        best = q;
      }
    }
    // Projected gradient ascent along the base manifold.
    Vec q = best;
    double step = 0.1;
    for (int it = 0; it < 200 && step > 1e-14; ++it) {
      const Mat t = base_.tangent(q).basis();
      const Vec g = pushed_tangent(q, t).transpose() * b;
      const Vec next = base_.closest_point(q + step * (t * g));
      if (b.dot(map(next)) > b.dot(map(q))) {
        q = next;
        step *= 1.5;
      } else {
        step *= 0.5;
      }
    }
    return map(q);
  }

  std::vector<ProjectionNode> projection_nodes(const Vec&, double, int) const override {
    throw ContractError("projection law is not available for sphere-projected manifolds");
  }
  double support_curvature(const Vec&) const override {
    throw ContractError("projection law is not available for sphere-projected manifolds");
  }

  double reach() const override { return reach_; }
  double exposure_radius() const override { return radius_; }
  double lambda() const override { return lambda_; }

 private:
  Vec flatten(const Vec& x) const { return x - nu_.dot(x - h0_) * nu_; }

  Vec map(const Vec& x) const {
    const Vec z = flatten(x) - c_;
    return c_ + radius_ * z / z.norm();
  }

  // Differential of map at x applied to the columns of w.
  Mat dmap(const Vec& x, const Mat& w) const {
    const Vec z = flatten(x) - c_;
    const double len = z.norm();
    const Vec zh = z / len;
    Mat flat = w - nu_ * (nu_.transpose() * w);
    return radius_ / len * (flat - zh * (zh.transpose() * flat));
  }

  Mat pushed_tangent(const Vec& q) const { return pushed_tangent(q, base_.tangent(q).basis()); }
  Mat pushed_tangent(const Vec& q, const Mat& t) const { return dmap(q, t); }

  double area_factor(const Vec& q) const {
    const Mat a = pushed_tangent(q);
    return std::sqrt(std::max(0.0, (a.transpose() * a).determinant()));
  }

  Vec preimage(const Vec& p) const {
    const double lam = nu_.dot(h0_ - c_) / nu_.dot(p - c_);
    const Vec y = c_ + lam * (p - c_);
    Vec q = base_.closest_point(y);
    for (int it = 0; it < 60; ++it) {
      const Vec err = y - flatten(q);
      if (err.norm() < 1e-15) break;
      q = base_.closest_point(q + err);
    }
    return q;
  }

  Vec closest_base(const Vec& x) const {
    Vec q = base_.closest_point(x);
    for (int it = 0; it < 80; ++it) {
      const Mat t = base_.tangent(q).basis();
      const Mat a = dmap(q, t);
      const Vec delta = a.colPivHouseholderQr().solve(x - map(q));
      q = base_.closest_point(q + t * delta);
      if (delta.norm() < 1e-15) break;
    }
    return q;
  }

  AnalyticManifold base_;
  Vec nu_, h0_, c_;
  double radius_;
  double reach_;
  double lambda_;
  double jac_max_ = 0.0;
  double volume_ = 0.0;
};

Mat default_frame(int n, int k, const Mat& frame) {
  if (frame.size() == 0) return Mat::Identity(n, k);
  if (frame.rows() != n || frame.cols() != k) {
    throw ContractError("manifold: frame must be n x k");
  }
  if ((frame.transpose() * frame - Mat::Identity(k, k)).cwiseAbs().maxCoeff() > 1e-10) {
    throw ContractError("manifold: frame columns must be orthonormal");
  }
  return frame;
}

}  // namespace

AnalyticManifold AnalyticManifold::place(std::shared_ptr<const Shape> shape, int n,
                                         const Vec& center, const Mat& frame) {
  const int k = shape->space_dim();
  if (n < k) throw ContractError("manifold: ambient dimension is smaller than the model space");
  Vec c = center.size() == 0 ? Vec::Zero(n) : center;
  if (c.size() != n) throw ContractError("manifold: center has the wrong dimension");
  GeometricBounds bounds;
  bounds.d = shape->dim();
  bounds.n = n;
  bounds.tau = shape->reach();
  bounds.V = shape->volume();
  bounds.R = shape->exposure_radius();
  bounds.Lambda = std::max(shape->lambda(), std::isfinite(bounds.tau) ? 1.0 / (bounds.tau * bounds.tau) : 0.0);
  AnalyticManifold m(std::move(shape), std::move(c), default_frame(n, k, frame), 1.0, bounds);

  // Largest norm: grid maximum refined by support-point iteration.
  double r = 0.0;
  Vec far;
  for (const Vec& x : m.grid_points(64)) {
    if (x.norm() > r) {
      r = x.norm();
      far = x;
    }
  }
  for (int it = 0; it < 20 && r > 0.0; ++it) {
    const Vec next = m.support_point(far / far.norm());
    if (next.norm() <= r * (1.0 + 1e-15)) break;
    r = next.norm();
    far = next;
  }
  if (r > 1.0 + 1e-12) {
    const double s = 1.0 / r;
    m.offset_ *= s;
    m.scale_ = s;
    m.bounds_ = m.bounds_.scaled(s);
  }
  return m;
}

AnalyticManifold AnalyticManifold::circle(double radius, int n, const Vec& center,
                                          const Mat& frame) {
  return place(detail::make_sphere_shape(radius, 1), n, center, frame);
}

AnalyticManifold AnalyticManifold::ellipse(double a, double b, int n, const Vec& center,
                                           const Mat& frame) {
  return place(detail::make_ellipse_shape(a, b), n, center, frame);
}

AnalyticManifold AnalyticManifold::sphere(double radius, int d, int n, const Vec& center,
                                          const Mat& frame) {
  return place(detail::make_sphere_shape(radius, d), n, center, frame);
}

AnalyticManifold AnalyticManifold::torus(double major, double minor, int n, const Vec& center,
                                         const Mat& frame) {
  return place(detail::make_torus_shape(major, minor), n, center, frame);
}

AnalyticManifold AnalyticManifold::flat_disc(double radius, int d, int n) {
  if (n <= d) throw ContractError("flat disc: need n > d");
  return place(detail::make_flat_disc_shape(radius, d), n, Vec(), Mat());
}

AnalyticManifold AnalyticManifold::from_shape(std::shared_ptr<const Shape> shape,
                                              const Vec& offset, const Mat& frame,
                                              GeometricBounds bounds) {
  AnalyticManifold m = place(std::move(shape), static_cast<int>(frame.rows()), offset, frame);
  m.bounds_ = bounds.scaled(m.scale_);
  return m;
}

double AnalyticManifold::volume() const { return bounds_.V; }

std::vector<Vec> AnalyticManifold::uniform_sample(int count, std::uint64_t seed) const {
  if (count < 1) throw ContractError("uniform_sample: count must be at least 1");
  std::mt19937_64 rng(seed);
  std::vector<Vec> out = shape_->sample(count, rng);
  for (Vec& y : out) y = to_ambient(y);
  return out;
}

std::vector<Vec> AnalyticManifold::grid_points(int per_dim) const {
  std::vector<Vec> out = shape_->grid(per_dim);
  for (Vec& y : out) y = to_ambient(y);
  return out;
}

Vec AnalyticManifold::closest_point(const Vec& x) const {
  if (x.size() != ambient_dim()) throw ContractError("closest_point: dimension mismatch");
  return to_ambient(shape_->closest(to_model(x)));
}

double AnalyticManifold::distance(const Vec& x) const { return (closest_point(x) - x).norm(); }

void AnalyticManifold::require_on_manifold(const Vec& p, double tol) const {
  const double dist = distance(p);
  if (dist > tol) {
    std::ostringstream msg;
    msg << "point is off the manifold by " << dist;
    throw ContractError(msg.str());
  }
}

Subspace AnalyticManifold::tangent(const Vec& p) const {
  return Subspace::from_orthonormal(frame_ * shape_->tangent(to_model(p)));
}

Subspace AnalyticManifold::normal_space(const Vec& p) const {
  return tangent(p).orthogonal_complement();
}

SecondFundamentalForm AnalyticManifold::second_fundamental_form(const Vec& p) const {
  const Vec y = to_model(p);
  SecondFundamentalForm out;
  out.tangent = Subspace::from_orthonormal(frame_ * shape_->tangent(y));
  for (const Vec& v : shape_->second_form(y)) out.values.push_back(frame_ * v / scale_);
  return out;
}

AnalyticManifold::SupportValue AnalyticManifold::support_exact(const Vec& b) const {
  if (b.size() != ambient_dim()) throw ContractError("support: dimension mismatch");
  if (b.norm() == 0.0) throw ContractError("support: direction must be nonzero");
  const Vec bm = scale_ * (frame_.transpose() * b);
  SupportValue out;
  if (const auto closed = shape_->support(bm)) {
    out.value = b.dot(offset_) + *closed;
    return out;
  }
  out.value = b.dot(support_point(b));
  const int per_dim = dim() == 1 ? 512 : 32;
  const std::vector<Vec> g = grid_points(per_dim);
  double chord = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double nearest = kInf;
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (i != j) nearest = std::min(nearest, (g[i] - g[j]).norm());
    }
    chord = std::max(chord, nearest);
  }
  out.resolution = chord;
  return out;
}

Vec AnalyticManifold::support_point(const Vec& b) const {
  return to_ambient(shape_->support_point(scale_ * (frame_.transpose() * b)));
}

std::vector<ProjectionNode> AnalyticManifold::projection_nodes(const Vec& b, double width,
                                                               int order) const {
  const Vec bm = scale_ * (frame_.transpose() * b);
  std::vector<ProjectionNode> nodes = shape_->projection_nodes(bm, width, order);
  const double shift = b.dot(offset_);
  for (auto& n : nodes) n.t += shift;
  return nodes;
}

double AnalyticManifold::support_curvature(const Vec& b) const {
  return shape_->support_curvature(scale_ * (frame_.transpose() * b));
}

SphereProjection sphere_projection_construct(const AnalyticManifold& m, double eps,
                                             const SphereProjectionOptions& options) {
  if (!(eps > 0.0 && eps < options.eps_limit)) {
    std::ostringstream msg;
    msg << "sphere projection: eps must lie in (0, " << options.eps_limit << ")";
    throw ContractError(msg.str());
  }
  const int n = m.ambient_dim();
  const double tau = m.bounds().tau;
  if (!std::isfinite(tau)) throw ContractError("sphere projection: manifold reach must be finite");
  const double spacing = eps * tau;

  // Greedy farthest-point net.
  std::vector<Vec> cand = m.uniform_sample(options.hull_samples, options.seed);
  for (const Vec& g : m.grid_points(m.dim() == 1 ? 512 : 48)) cand.push_back(g);
  std::vector<double> gap(cand.size(), kInf);
  std::vector<Vec> net;
  std::size_t next = 0;
  while (true) {
    net.push_back(cand[next]);
    double far = 0.0;
    for (std::size_t i = 0; i < cand.size(); ++i) {
      gap[i] = std::min(gap[i], (cand[i] - net.back()).norm());
      if (gap[i] > far) {
        far = gap[i];
        next = i;
      }
    }
    if (far < spacing) break;
    if (static_cast<int>(net.size()) > n) {
      std::ostringstream msg;
      msg << "sphere projection: the eps*tau net needs more than " << n
          << " points, which exceeds the ambient dimension " << n
          << "; use a larger ambient dimension or a larger eps";
      throw ContractError(msg.str());
    }
  }

  // Hyperplane through the net; the free normal direction is the one of
  // least sample variance.
  Mat directions = Mat::Zero(n, 0);
  if (net.size() > 1) {
    directions.resize(n, static_cast<Eigen::Index>(net.size() - 1));
    for (std::size_t i = 1; i < net.size(); ++i) directions.col(static_cast<Eigen::Index>(i - 1)) = net[i] - net[0];
  }
  Mat free_dirs;
  if (directions.cols() > 0 && directions.norm() > 0.0) {
    const Subspace hull = Subspace::span_of(directions, 1e-9);
    if (hull.dim() >= n) throw ContractError("sphere projection: net spans the whole space");
    free_dirs = hull.orthogonal_complement().basis();
  } else {
    free_dirs = Mat::Identity(n, n);
  }
  Vec mean = Vec::Zero(n);
  for (const Vec& x : cand) mean += x;
  mean /= static_cast<double>(cand.size());
  Mat cov = Mat::Zero(n, n);
  for (const Vec& x : cand) cov += (x - mean) * (x - mean).transpose();
  Eigen::SelfAdjointEigenSolver<Mat> eig(free_dirs.transpose() * cov * free_dirs);
  Vec nu = free_dirs * eig.eigenvectors().col(0);
  nu.normalize();

  const Vec h0 = net[0];
  const Vec foot = nu.dot(h0) * nu;
  const double radius = 1.0 / spacing;
  const Vec center = foot.norm() > 1e-12 ? Vec(foot - radius * foot / foot.norm()) : Vec(-radius * nu);

  const double reach = tau * (1.0 - options.reach_loss * eps);
  const double lambda = std::max(m.bounds().Lambda, 1.0 / (reach * reach));
  auto shape = std::make_shared<ProjectedShape>(m, nu, h0, center, radius, reach, lambda);
  GeometricBounds bounds;
  bounds.d = m.dim();
  bounds.n = n;
  bounds.tau = reach;
  bounds.V = shape->volume();
  bounds.R = radius;
  bounds.Lambda = lambda;

  SphereProjection out{AnalyticManifold::from_shape(shape, Vec::Zero(n), Mat::Identity(n, n), bounds),
                       nu, h0, center, radius, static_cast<int>(net.size())};
  const double s = out.manifold.scale();
  out.hyperplane_point *= s;
  out.ball_center *= s;
  out.ball_radius *= s;
  return out;
}

}  // namespace mfit
