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


#include "mfit/pointcloud.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <cstring>
#include <fstream>

#include "mfit/errors.hpp"
#include "mfit/net.hpp"

namespace mfit {

namespace {

constexpr std::array<char, 8> kMagic = {'M', 'F', 'P', 'C', '1', '\0', '\0', '\0'};
constexpr std::uint64_t kMaxColumns = 1u << 16;

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  out.write(bytes.data(), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  std::array<char, sizeof(T)> bytes;
  if (!in.read(bytes.data(), sizeof(T))) throw FormatError("point cloud: truncated file");
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

std::size_t PointCloud::count() const {
  return columns.empty() ? 0 : values.size() / columns.size();
}

Vec PointCloud::point(std::size_t i) const {
  if (i >= count()) throw ContractError("point cloud: row out of range");
  Vec p(dim);
  for (int k = 0; k < dim; ++k) p(k) = values[i * columns.size() + k];
  return p;
}

double PointCloud::at(std::size_t row, std::size_t col) const {
  if (row >= count() || col >= columns.size()) throw ContractError("point cloud: index out of range");
  return values[row * columns.size() + col];
}

std::vector<Vec> PointCloud::points() const {
  std::vector<Vec> out;
  out.reserve(count());
  for (std::size_t i = 0; i < count(); ++i) out.push_back(point(i));
  return out;
}

PointCloud make_cloud(const std::vector<Vec>& points) {
  if (points.empty()) throw ContractError("point cloud: no points");
  PointCloud c;
  c.dim = static_cast<int>(points.front().size());
  for (int k = 0; k < c.dim; ++k) c.columns.push_back("x" + std::to_string(k));
  c.values.reserve(points.size() * c.dim);
  for (const Vec& p : points) {
    if (p.size() != c.dim) throw ContractError("point cloud: mixed dimensions");
    c.values.insert(c.values.end(), p.data(), p.data() + p.size());
  }
  return c;
}

PointCloud net_cloud(const ReconstructionNet& net) {
  if (net.entries.empty()) throw ContractError("point cloud: empty net");
  PointCloud c;
  c.dim = static_cast<int>(net.entries.front().direction.size());
  for (int k = 0; k < c.dim; ++k) c.columns.push_back("x" + std::to_string(k));
  for (const char* name : {"iteration", "accepted", "failed"}) c.columns.emplace_back(name);
  for (int k = 0; k < c.dim; ++k) c.columns.push_back("v" + std::to_string(k));
  c.columns.emplace_back("spread");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t j = 0; j < net.entries.size(); ++j) {
    const NetEntry& e = net.entries[j];
    if (e.direction.size() != c.dim) throw ContractError("point cloud: mixed net dimensions");
    for (int k = 0; k < c.dim; ++k) c.values.push_back(e.point.size() == c.dim ? e.point(k) : nan);
    c.values.push_back(static_cast<double>(j));
    c.values.push_back(e.accepted ? 1.0 : 0.0);
    c.values.push_back(e.failed ? 1.0 : 0.0);
    c.values.insert(c.values.end(), e.direction.data(), e.direction.data() + c.dim);
    c.values.push_back(e.spread);
  }
  return c;
}

bool is_net_cloud(const PointCloud& cloud) {
  return cloud.extra() == cloud.dim + 4 && cloud.columns[cloud.dim] == "iteration" &&
         cloud.columns[cloud.dim + 1] == "accepted";
}

ReconstructionNet net_from_cloud(const PointCloud& cloud) {
  if (!is_net_cloud(cloud)) throw FormatError("point cloud: not a net file");
  const std::size_t n = static_cast<std::size_t>(cloud.dim);
  ReconstructionNet net;
  for (std::size_t i = 0; i < cloud.count(); ++i) {
    NetEntry e;
    e.accepted = cloud.at(i, n + 1) != 0.0;
    e.failed = cloud.at(i, n + 2) != 0.0;
    if (!std::isnan(cloud.at(i, 0))) e.point = cloud.point(i);
    e.direction = Vec(cloud.dim);
    for (std::size_t k = 0; k < n; ++k) e.direction(k) = cloud.at(i, n + 3 + k);
    e.spread = cloud.at(i, 2 * n + 3);
    net.accepted += e.accepted ? 1 : 0;
    net.failures += e.failed ? 1 : 0;
    net.entries.push_back(std::move(e));
  }
  net.iterations = static_cast<long long>(net.entries.size());
  net.acceptance_rate = net.iterations > 0
                            ? static_cast<double>(net.accepted) / static_cast<double>(net.iterations)
                            : 0.0;
  return net;
}

void write_cloud(std::ostream& out, const PointCloud& cloud) {
  if (cloud.dim < 1 || static_cast<int>(cloud.columns.size()) < cloud.dim ||
      cloud.values.size() % cloud.columns.size() != 0) {
    throw ContractError("point cloud: inconsistent shape");
  }
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(cloud.dim));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(cloud.extra()));
  put_le<std::uint64_t>(out, cloud.count());
  for (const std::string& name : cloud.columns) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
  }
  for (double v : cloud.values) put_le<double>(out, v);
}

PointCloud read_cloud(std::istream& in) {
  std::array<char, 8> magic;
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw FormatError("point cloud: bad magic");
  }
  PointCloud c;
  const auto n = get_le<std::uint32_t>(in);
  const auto extra = get_le<std::uint32_t>(in);
  const auto count = get_le<std::uint64_t>(in);
  if (n == 0 || std::uint64_t{n} + extra > kMaxColumns) throw FormatError("point cloud: bad column count");
  c.dim = static_cast<int>(n);
  for (std::uint32_t k = 0; k < n + extra; ++k) {
    const auto len = get_le<std::uint32_t>(in);
    if (len > 4096) throw FormatError("point cloud: column name too long");
    std::string name(len, '\0');
    if (!in.read(name.data(), len)) throw FormatError("point cloud: truncated header");
    c.columns.push_back(std::move(name));
  }
  const std::uint64_t total = count * c.columns.size();
  if (count != 0 && total / count != c.columns.size()) throw FormatError("point cloud: size overflow");
  c.values.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(total, 1u << 24)));
  for (std::uint64_t k = 0; k < total; ++k) c.values.push_back(get_le<double>(in));
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("point cloud: trailing bytes");
  return c;
}

void save_cloud(const std::string& path, const PointCloud& cloud) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ContractError("cannot write " + path);
  write_cloud(out, cloud);
  if (!out) throw ContractError("write failed: " + path);
}

PointCloud load_cloud(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ContractError("cannot read " + path);
  return read_cloud(in);
}

}  // namespace mfit
