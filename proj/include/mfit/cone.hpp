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
#include <span>
#include <utility>
#include <vector>

#include "mfit/geometry.hpp"

namespace mfit {

// Closed convex cone with a finite description. A generated cone is
// {sum_i l_i g_i : l >= 0}; a constrained cone is {y : <a_i, y> <= 0 for all i}.
// The two forms are polar to each other, so polar() only flips the tag.
class Cone {
 public:
  enum class Form { Generated, Constrained };

  static Cone generated(Mat generators);
  static Cone constrained(Mat normals, int ambient_dim);

  Form form() const { return form_; }
  const Mat& vectors() const { return vectors_; }
  int ambient_dim() const { return ambient_dim_; }

  Cone polar() const;
  bool contains(const Vec& x, double tol = 1e-8) const;
  // Euclidean projection onto the cone.
  Vec project(const Vec& x) const;
  // Distance from x to the unit-ball slice of the cone.
  double slice_distance(const Vec& x) const;
  // True when the cone is {0}.
  bool is_zero() const;
  // Planar cones only: equivalent generated form (boundary rays).
  Cone to_generated() const;

  // Unit vectors of the cone. Planar cones are sampled on an even angular
  // grid; higher dimensions by seeded rejection from the sphere.
  std::vector<Vec> unit_samples(int count, std::uint64_t seed) const;

 private:
  Cone(Form form, Mat vectors, int ambient_dim)
      : form_(form), vectors_(std::move(vectors)), ambient_dim_(ambient_dim) {}

  Form form_ = Form::Generated;
  Mat vectors_;
  int ambient_dim_ = 0;
};

struct ConeDistanceReport {
  double estimate = 0.0;    // Hausdorff distance of the unit-ball slices
  double resolution = 0.0;  // largest gap of the sampling grid (chord length)
  int sample_count = 0;
};

// Hausdorff distance between K1 and K2 intersected with the unit ball.
// The supremum is attained at unit vectors, so only those are sampled.
ConeDistanceReport cone_hausdorff(const Cone& k1, const Cone& k2, int sample_count,
                                  std::uint64_t seed = 1);

std::pair<ConeDistanceReport, ConeDistanceReport> polar_cone_distance_pair(
    const Cone& k1, const Cone& k2, int sample_count, std::uint64_t seed = 1);

// Normal cone {v : <v, x - p> <= 0 for all hull points x}. Planar results are
// returned in generated form. Throws "not extreme" when p lies in the convex
// hull of the other points.
Cone normal_cone_at(std::span<const Vec> hull_points, const Vec& p);

// Nonnegative least squares min |A l - b| subject to l >= 0 (Lawson-Hanson).
Vec nnls(const Mat& a, const Vec& b);

}  // namespace mfit
