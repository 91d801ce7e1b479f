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


#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>

#include "mfit/errors.hpp"
#include "mfit/implicit.hpp"

namespace mfit {

namespace {

constexpr const char* kMagic = "mfit-implicit";
constexpr int kVersion = 1;

void put(std::ostream& out, double v) {
  if (std::isinf(v)) {
    out << (v > 0 ? "inf" : "-inf");
  } else {
    out << v;
  }
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next line split into tokens; the first must equal `key`.
  std::vector<std::string> expect(const std::string& key, std::size_t values) {
    std::string line;
    if (!std::getline(in_, line)) fail("unexpected end of input, wanted '" + key + "'");
    ++line_no_;
    std::istringstream ss(line);
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    if (tok.empty() || tok.front() != key) fail("expected '" + key + "'");
    if (tok.size() != values + 1) fail("wrong value count for '" + key + "'");
    tok.erase(tok.begin());
    return tok;
  }

  double number(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') fail("bad number '" + s + "'");
    return v;
  }

  long long integer(const std::string& s) {
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0') fail("bad integer '" + s + "'");
    return v;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError("implicit manifold, line " + std::to_string(line_no_) + ": " + what);
  }

 private:
  std::istream& in_;
  int line_no_ = 0;
};

}  // namespace

void write_implicit(std::ostream& out, const ImplicitManifold& im) {
  const DiscAtlas& a = im.atlas();
  const GeometricBounds& b = im.bounds();
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << kMagic << ' ' << kVersion << '\n';
  out << "dim " << a.dim << '\n';
  out << "ambient " << a.ambient << '\n';
  out << "discs " << a.size() << '\n';
  for (const Vec& p : a.centers) {
    out << "center";
    for (Eigen::Index k = 0; k < p.size(); ++k) {
      out << ' ';
      put(out, p(k));
    }
    out << '\n';
  }
  for (const Mat& f : a.frames) {
    out << "frame";
    for (Eigen::Index r = 0; r < f.rows(); ++r) {
      for (Eigen::Index c = 0; c < f.cols(); ++c) {
        out << ' ';
        put(out, f(r, c));
      }
    }
    out << '\n';
  }
  for (double c : im.weights()) {
    out << "weight ";
    put(out, c);
    out << '\n';
  }
  out << "radius ";
  put(out, a.radius);
  out << '\n';
  out << "bounds " << b.d << ' ' << b.n;
  for (double v : {b.tau, b.V, b.R, b.Lambda}) {
    out << ' ';
    put(out, v);
  }
  out << '\n';
  out << "end\n";
}

ImplicitManifold read_implicit(std::istream& in) {
  LineReader r(in);
  const auto head = r.expect(kMagic, 1);
  if (r.integer(head[0]) != kVersion) r.fail("unsupported version " + head[0]);
  const long long d = r.integer(r.expect("dim", 1)[0]);
  const long long n = r.integer(r.expect("ambient", 1)[0]);
  const long long k = r.integer(r.expect("discs", 1)[0]);
  if (d < 1 || n <= d || k < 1) r.fail("invalid dimensions");

  std::vector<Vec> centers;
  for (long long i = 0; i < k; ++i) {
    const auto tok = r.expect("center", static_cast<std::size_t>(n));
    Vec p(n);
    for (long long j = 0; j < n; ++j) p(j) = r.number(tok[j]);
    centers.push_back(std::move(p));
  }
  std::vector<Mat> frames;
  for (long long i = 0; i < k; ++i) {
    const auto tok = r.expect("frame", static_cast<std::size_t>(n * d));
    Mat f(n, d);
    for (long long row = 0; row < n; ++row) {
      for (long long c = 0; c < d; ++c) f(row, c) = r.number(tok[row * d + c]);
    }
    frames.push_back(std::move(f));
  }
  std::vector<double> weights;
  for (long long i = 0; i < k; ++i) weights.push_back(r.number(r.expect("weight", 1)[0]));
  const double radius = r.number(r.expect("radius", 1)[0]);
  const auto bt = r.expect("bounds", 6);
  GeometricBounds bounds;
  bounds.d = static_cast<int>(r.integer(bt[0]));
  bounds.n = static_cast<int>(r.integer(bt[1]));
  bounds.tau = r.number(bt[2]);
  bounds.V = r.number(bt[3]);
  bounds.R = r.number(bt[4]);
  bounds.Lambda = r.number(bt[5]);
  r.expect("end", 0);

  try {
    return ImplicitManifold(make_atlas(std::move(centers), std::move(frames), radius),
                            std::move(weights), bounds);
  } catch (const FormatError&) {
    throw;
  } catch (const ContractError& e) {
    throw FormatError(std::string("implicit manifold: ") + e.what());
  }
}

void save_implicit(const std::string& path, const ImplicitManifold& im) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ContractError("cannot write " + path);
  write_implicit(out, im);
  if (!out) throw ContractError("write failed: " + path);
}

ImplicitManifold load_implicit(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ContractError("cannot read " + path);
  return read_implicit(in);
}

}  // namespace mfit
