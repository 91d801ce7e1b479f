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

// Internal shape factories shared by manifold.cpp.
#pragma once

#include <memory>

#include "mfit/manifold.hpp"

namespace mfit::detail {

std::shared_ptr<const Shape> make_sphere_shape(double radius, int d);
std::shared_ptr<const Shape> make_ellipse_shape(double a, double b);
std::shared_ptr<const Shape> make_torus_shape(double major, double minor);
std::shared_ptr<const Shape> make_flat_disc_shape(double radius, int d);

// Law of t = amplitude * cos(theta) with density proportional to
// sin(theta)^exponent on [0, pi], graded around theta = 0.
std::vector<ProjectionNode> theta_nodes(double amplitude, double exponent, double width,
                                        int order);

// Normalizes log weights so they sum to one.
void normalize_nodes(std::vector<ProjectionNode>& nodes);

}  // namespace mfit::detail
