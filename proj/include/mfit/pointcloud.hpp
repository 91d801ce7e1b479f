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
#include <iosfwd>
#include <string>
#include <vector>

#include "mfit/geometry.hpp"

namespace mfit {

struct ReconstructionNet;

// Binary point cloud. Layout, all integers and floats little-endian:
//   "MFPC1" then three zero bytes
//   u32 n, u32 extra, u64 count
//   n + extra column names, each u32 length + bytes
//   count rows of n + extra float64
// The first n columns are coordinates; `extra` provenance columns follow.
struct PointCloud {
  int dim = 0;
  std::vector<std::string> columns;
  std::vector<double> values;  // row-major, count * columns.size()

  std::size_t count() const;
  int extra() const { return static_cast<int>(columns.size()) - dim; }
  Vec point(std::size_t i) const;
  double at(std::size_t row, std::size_t col) const;
  std::vector<Vec> points() const;
};

// Columns x0..x{n-1}.
PointCloud make_cloud(const std::vector<Vec>& points);

// One row per Find-points iteration: x0..x{n-1} (NaN when no point was
// returned), iteration, accepted, failed, v0..v{n-1}, spread.
PointCloud net_cloud(const ReconstructionNet& net);
bool is_net_cloud(const PointCloud& cloud);
// Inverse of net_cloud; acceptance_bound is left at zero.
ReconstructionNet net_from_cloud(const PointCloud& cloud);

void write_cloud(std::ostream& out, const PointCloud& cloud);
PointCloud read_cloud(std::istream& in);
void save_cloud(const std::string& path, const PointCloud& cloud);
PointCloud load_cloud(const std::string& path);

}  // namespace mfit
