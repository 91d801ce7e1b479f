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


#include "mfit/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mfit/errors.hpp"

namespace mfit {

using nlohmann::json;

namespace {

void require_object(const json& j, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw FormatError("config: '" + where + "' must be an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& item : j.items()) {
    if (!keys.count(item.key())) {
      throw FormatError("config: unknown key '" + item.key() + "' in '" + where + "'");
    }
  }
}

double positive(const json& j, const std::string& key) {
  if (!j.is_number()) throw FormatError("config: '" + key + "' must be a number");
  const double v = j.get<double>();
  if (!(v > 0.0) || !std::isfinite(v)) throw FormatError("config: '" + key + "' must be positive");
  return v;
}

long long integer(const json& j, const std::string& key, long long min) {
  if (!j.is_number_integer()) throw FormatError("config: '" + key + "' must be an integer");
  const long long v = j.get<long long>();
  if (v < min) throw FormatError("config: '" + key + "' must be at least " + std::to_string(min));
  return v;
}

template <typename T, typename F>
void read_if(const json& obj, const char* key, T& out, F&& convert) {
  if (obj.contains(key)) out = convert(obj.at(key), key);
}

}  // namespace

std::string to_string(OracleMode mode) {
  return mode == OracleMode::Exact ? "exact" : "sampled";
}

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("config: invalid JSON: ") + e.what());
  }
  require_object(doc, "root",
                 {"manifold", "bounds", "sigma", "eps", "opt_eps", "eta", "mode", "samples",
                  "pca_dim", "seeds", "eval_samples", "constants"});
  ExperimentConfig c;
  auto pos = [](const json& j, const char* k) { return positive(j, k); };
  auto count = [](long long min) {
    return [min](const json& j, const char* k) { return integer(j, k, min); };
  };

  if (!doc.contains("manifold")) throw FormatError("config: missing 'manifold'");
  const json& m = doc.at("manifold");
  require_object(m, "manifold", {"kind", "n", "d", "radius", "a", "b", "major", "minor"});
  if (!m.contains("kind") || !m.at("kind").is_string()) {
    throw FormatError("config: 'manifold.kind' must be a string");
  }
  c.manifold.kind = m.at("kind").get<std::string>();
  static const std::set<std::string> kinds = {"circle", "ellipse", "sphere", "torus", "flat_disc"};
  if (!kinds.count(c.manifold.kind)) throw FormatError("config: unknown manifold kind '" + c.manifold.kind + "'");
  c.manifold.n = static_cast<int>(c.manifold.kind == "circle" || c.manifold.kind == "ellipse" ? 2 : 3);
  long long n = c.manifold.n;
  long long d = c.manifold.kind == "sphere" || c.manifold.kind == "torus" ? 2 : 1;
  if (c.manifold.kind == "flat_disc") d = 2;
  read_if(m, "n", n, count(2));
  read_if(m, "d", d, count(1));
  c.manifold.n = static_cast<int>(n);
  c.manifold.d = static_cast<int>(d);
  read_if(m, "radius", c.manifold.radius, pos);
  read_if(m, "a", c.manifold.a, pos);
  read_if(m, "b", c.manifold.b, pos);
  read_if(m, "major", c.manifold.major, pos);
  read_if(m, "minor", c.manifold.minor, pos);

  if (doc.contains("bounds")) {
    const json& b = doc.at("bounds");
    require_object(b, "bounds", {"tau", "V", "R", "Lambda"});
    read_if(b, "tau", c.tau, pos);
    read_if(b, "V", c.V, pos);
    read_if(b, "R", c.R, pos);
    read_if(b, "Lambda", c.Lambda, pos);
  }
  read_if(doc, "sigma", c.sigma, pos);
  read_if(doc, "eps", c.eps, pos);
  read_if(doc, "opt_eps", c.opt_eps, pos);
  read_if(doc, "eta", c.eta, pos);
  if (!(c.eta < 1.0)) throw FormatError("config: 'eta' must lie in (0, 1)");
  if (!(c.opt_eps < 1.0)) throw FormatError("config: 'opt_eps' must lie in (0, 1)");
  if (doc.contains("mode")) {
    const json& mode = doc.at("mode");
    if (mode == "exact") {
      c.mode = OracleMode::Exact;
    } else if (mode == "sampled") {
      c.mode = OracleMode::Sampled;
    } else {
      throw FormatError("config: 'mode' must be \"exact\" or \"sampled\"");
    }
  }
  if (doc.contains("samples")) {
    const json& s = doc.at("samples");
    require_object(s, "samples", {"dataset", "per_call", "slab_count", "phases"});
    read_if(s, "dataset", c.dataset_size, count(0));
    read_if(s, "per_call", c.samples_per_call, count(1));
    long long slabs = c.slab_count, phases = c.calibration_phases;
    read_if(s, "slab_count", slabs, count(1));
    read_if(s, "phases", phases, count(1));
    c.slab_count = static_cast<int>(slabs);
    c.calibration_phases = static_cast<int>(phases);
  }
  read_if(doc, "pca_dim", c.pca_dim, count(0));
  if (doc.contains("seeds")) {
    const json& s = doc.at("seeds");
    require_object(s, "seeds", {"master"});
    if (s.contains("master")) {
      if (!s.at("master").is_number_unsigned()) throw FormatError("config: 'seeds.master' must be a non-negative integer");
      c.master_seed = s.at("master").get<std::uint64_t>();
    }
  }
  long long eval = c.eval_samples;
  read_if(doc, "eval_samples", eval, count(1));
  c.eval_samples = static_cast<int>(eval);

  if (doc.contains("constants")) {
    const json& k = doc.at("constants");
    require_object(k, "constants",
                   {"C_cone", "C_acc", "c_lo", "C_w", "C_frob", "cap_factor", "subnet_c",
                    "radius_factor", "sphere_net_cap", "n0_cap"});
    ConstantSet& cs = c.constants;
    read_if(k, "C_cone", cs.C_cone, pos);
    read_if(k, "C_acc", cs.C_acc, pos);
    read_if(k, "c_lo", cs.c_lo, pos);
    read_if(k, "C_w", cs.C_w, pos);
    read_if(k, "C_frob", cs.C_frob, pos);
    read_if(k, "cap_factor", cs.cap_factor, pos);
    read_if(k, "subnet_c", cs.subnet_c, pos);
    read_if(k, "radius_factor", cs.radius_factor, pos);
    read_if(k, "sphere_net_cap", cs.sphere_net_cap, count(1));
    read_if(k, "n0_cap", cs.n0_cap, count(1));
    if (!(cs.c_lo < 1.0)) throw FormatError("config: 'c_lo' must lie in (0, 1)");
    for (const auto& item : k.items()) cs.overridden.push_back(item.key());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("config: cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& c) {
  json doc;
  doc["manifold"] = {{"kind", c.manifold.kind}, {"n", c.manifold.n}, {"d", c.manifold.d},
                     {"radius", c.manifold.radius}, {"a", c.manifold.a}, {"b", c.manifold.b},
                     {"major", c.manifold.major}, {"minor", c.manifold.minor}};
  json bounds = json::object();
  if (!std::isnan(c.tau)) bounds["tau"] = c.tau;
  if (!std::isnan(c.V)) bounds["V"] = c.V;
  if (!std::isnan(c.R)) bounds["R"] = c.R;
  if (!std::isnan(c.Lambda)) bounds["Lambda"] = c.Lambda;
  if (!bounds.empty()) doc["bounds"] = bounds;
  doc["sigma"] = c.sigma;
  doc["eps"] = c.eps;
  doc["opt_eps"] = c.opt_eps;
  doc["eta"] = c.eta;
  doc["mode"] = to_string(c.mode);
  doc["samples"] = {{"dataset", c.dataset_size}, {"per_call", c.samples_per_call},
                    {"slab_count", c.slab_count}, {"phases", c.calibration_phases}};
  doc["pca_dim"] = c.pca_dim;
  doc["seeds"] = {{"master", c.master_seed}};
  doc["eval_samples"] = c.eval_samples;
  const ConstantSet& k = c.constants;
  doc["constants"] = {{"C_cone", k.C_cone}, {"C_acc", k.C_acc}, {"c_lo", k.c_lo},
                      {"C_w", k.C_w}, {"C_frob", k.C_frob}, {"cap_factor", k.cap_factor},
                      {"subnet_c", k.subnet_c}, {"radius_factor", k.radius_factor},
                      {"sphere_net_cap", k.sphere_net_cap}, {"n0_cap", k.n0_cap}};
  return doc.dump(2) + "\n";
}

AnalyticManifold build_manifold(const ManifoldSpec& s) {
  if (s.kind == "circle") return AnalyticManifold::circle(s.radius, s.n);
  if (s.kind == "ellipse") return AnalyticManifold::ellipse(s.a, s.b, s.n);
  if (s.kind == "sphere") return AnalyticManifold::sphere(s.radius, s.d, s.n);
  if (s.kind == "torus") return AnalyticManifold::torus(s.major, s.minor, s.n);
  if (s.kind == "flat_disc") return AnalyticManifold::flat_disc(s.radius, s.d, s.n);
  throw FormatError("config: unknown manifold kind '" + s.kind + "'");
}

GeometricBounds effective_bounds(const ExperimentConfig& c, const AnalyticManifold& m) {
  GeometricBounds b = m.bounds();
  if (!std::isnan(c.tau)) b.tau = c.tau;
  if (!std::isnan(c.V)) b.V = c.V;
  if (!std::isnan(c.R)) b.R = c.R;
  if (!std::isnan(c.Lambda)) b.Lambda = c.Lambda;
  b.validate();
  return b;
}

}  // namespace mfit
