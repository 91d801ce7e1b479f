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
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mfit/geometry.hpp"

namespace mfit {

enum class ManifoldKind { Circle, Ellipse, Sphere, Torus, FlatDisc, SphereProjected };

std::string to_string(ManifoldKind kind);

// Quadrature for the law of t = <x, b> under the normalized surface measure.
// Weights are stored as logarithms and sum to one.
struct ProjectionNode {
  double t;
  double log_weight;
};

// A compact d-dimensional shape in its own model space R^k. Subclasses live
// in manifold_shapes.cpp; AnalyticManifold places a shape in R^n.
class Shape {
 public:
  virtual ~Shape() = default;

  virtual ManifoldKind kind() const = 0;
  virtual int dim() const = 0;
  virtual int space_dim() const = 0;

  virtual Vec closest(const Vec& x) const = 0;
  // Orthonormal tangent basis (k x d) at a point of the shape.
  virtual Mat tangent(const Vec& p) const = 0;
  // II(e_i, e_j) on the basis returned by tangent(p), row-major.
  virtual std::vector<Vec> second_form(const Vec& p) const = 0;
  virtual std::vector<Vec> sample(int count, std::mt19937_64& rng) const = 0;
  virtual double volume() const = 0;
  // Points on a regular parameter grid, about `per_dim` per parameter.
  virtual std::vector<Vec> grid(int per_dim) const = 0;

  // Closed-form support function when available.
  virtual std::optional<double> support(const Vec& b) const = 0;
  virtual Vec support_point(const Vec& b) const = 0;

  // Graded quadrature for the pushforward of the surface measure under
  // x -> <x, b>, refined around the maximizer at scale `width` (parameter
  // units) with `order` Gauss-Legendre nodes per panel.
  virtual std::vector<ProjectionNode> projection_nodes(const Vec& b, double width,
                                                       int order) const = 0;
  // Parameter-space curvature scale along b at the maximizer: the
  // second derivative of <x(u), b> (largest eigenvalue, nonnegative).
  virtual double support_curvature(const Vec& b) const = 0;

  // Closed-form geometric constants of the unscaled shape.
  virtual double reach() const = 0;
  virtual double exposure_radius() const = 0;
  virtual double lambda() const = 0;
};

// Ground-truth manifold x = offset + scale * frame * y, y on a Shape.
// Construction rescales so the image lies in the closed unit ball.
class AnalyticManifold {
 public:
  static AnalyticManifold circle(double radius, int n = 2, const Vec& center = Vec(),
                                 const Mat& frame = Mat());
  static AnalyticManifold ellipse(double a, double b, int n = 2, const Vec& center = Vec(),
                                  const Mat& frame = Mat());
  static AnalyticManifold sphere(double radius, int d = 2, int n = 3, const Vec& center = Vec(),
                                 const Mat& frame = Mat());
  static AnalyticManifold torus(double major, double minor, int n = 3,
                                const Vec& center = Vec(), const Mat& frame = Mat());
  static AnalyticManifold flat_disc(double radius, int d, int n);
  // Used by sphere_projection_construct.
  static AnalyticManifold from_shape(std::shared_ptr<const Shape> shape, const Vec& offset,
                                     const Mat& frame, GeometricBounds bounds);

  ManifoldKind kind() const { return shape_->kind(); }
  int dim() const { return shape_->dim(); }
  int ambient_dim() const { return static_cast<int>(frame_.rows()); }
  const GeometricBounds& bounds() const { return bounds_; }
  double volume() const;
  double scale() const { return scale_; }
  const Vec& offset() const { return offset_; }
  const Mat& frame() const { return frame_; }
  const Shape& shape() const { return *shape_; }

  std::vector<Vec> uniform_sample(int count, std::uint64_t seed) const;
  std::vector<Vec> grid_points(int per_dim) const;

  Vec closest_point(const Vec& x) const;
  double distance(const Vec& x) const;
  // Throws ContractError when p is farther than `tol` from the manifold.
  void require_on_manifold(const Vec& p, double tol = 1e-8) const;

  Subspace tangent(const Vec& p) const;
  Subspace normal_space(const Vec& p) const;
  SecondFundamentalForm second_fundamental_form(const Vec& p) const;

  struct SupportValue {
    double value = 0.0;
    double resolution = 0.0;  // 0 for closed forms, else grid chord length
  };
  // sup over the manifold of <b, x>; b must be a unit vector.
  SupportValue support_exact(const Vec& b) const;
  double support(const Vec& b) const { return support_exact(b).value; }
  // A maximizer of <b, x>.
  Vec support_point(const Vec& b) const;

  std::vector<ProjectionNode> projection_nodes(const Vec& b, double width, int order) const;
  // Second derivative scale of <b, x> at the maximizer, in parameter units.
  double support_curvature(const Vec& b) const;

  // Model-space to ambient and back (for points on the manifold).
  Vec to_ambient(const Vec& y) const { return offset_ + scale_ * (frame_ * y); }
  Vec to_model(const Vec& x) const { return frame_.transpose() * (x - offset_) / scale_; }

 private:
  AnalyticManifold(std::shared_ptr<const Shape> shape, Vec offset, Mat frame, double scale,
                   GeometricBounds bounds)
      : shape_(std::move(shape)),
        offset_(std::move(offset)),
        frame_(std::move(frame)),
        scale_(scale),
        bounds_(bounds) {}
  static AnalyticManifold place(std::shared_ptr<const Shape> shape, int n, const Vec& center,
                                const Mat& frame);

  std::shared_ptr<const Shape> shape_;
  Vec offset_;
  Mat frame_;
  double scale_ = 1.0;
  GeometricBounds bounds_;
};

// Volume of the d-dimensional unit ball.
double omega_d(int d);

struct BetaResult {
  double beta = 0.0;
  long long D = 0;
  double eps_max = 0.0;
};
// Dimension-reduction constants for alpha in (0, 1).
BetaResult beta_and_D(double alpha, const GeometricBounds& bounds);

struct SphereProjectionOptions {
  double eps_limit = 0.1;      // eps must lie in (0, eps_limit)
  double reach_loss = 2.0;     // declared reach is tau * (1 - reach_loss * eps)
  int hull_samples = 4000;     // candidate points for the greedy net
  std::uint64_t seed = 11;
};

struct SphereProjection {
  AnalyticManifold manifold;
  Vec hyperplane_normal;
  Vec hyperplane_point;
  Vec ball_center;
  double ball_radius = 0.0;
  int net_size = 0;
};

// Flattens m onto the hyperplane through a greedy eps*tau net, then projects
// radially onto the tangent sphere of radius 1/(eps*tau).
SphereProjection sphere_projection_construct(const AnalyticManifold& m, double eps,
                                             const SphereProjectionOptions& options = {});

// Graph of the manifold over its tangent plane at p, on a ball of radius
// tau/8: q = p + x + f(x) with x in T_p and f(x) in the normal space.
class LocalGraph {
 public:
  LocalGraph(const AnalyticManifold& m, const Vec& p);

  const Vec& base() const { return base_; }
  const Subspace& tangent() const { return tangent_; }
  const Subspace& normal() const { return normal_; }
  double radius() const { return radius_; }

  // x in tangent coordinates (length d); returns normal coordinates.
  Vec value(const Vec& x) const;
  // d f at x, (n-d) x d, central differences.
  Mat differential(const Vec& x) const;
  // Norm of d^2 f at x (max over coordinate pairs, central differences).
  double second_differential_norm(const Vec& x) const;

  struct BoundReport {
    double max_value_ratio = 0.0;   // |f(x)| / (|x|^2 / tau)
    double max_slope_ratio = 0.0;   // ||df_x|| / (|x| / tau)
    double max_second_norm = 0.0;   // ||d^2 f|| * tau
    int points = 0;
  };
  // Evaluates the three derivative bounds on a grid of the tangent ball.
  BoundReport check_bounds(int per_dim) const;

 private:
  Vec lift(const Vec& x) const;

  AnalyticManifold manifold_;
  Vec base_;
  Subspace tangent_;
  Subspace normal_;
  double radius_ = 0.0;
  double tau_ = 0.0;
};

}  // namespace mfit
