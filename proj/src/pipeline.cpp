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


#include "mfit/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <sstream>

#include "json.hpp"
#include "mfit/errors.hpp"
#include "mfit/noise_pca.hpp"
#include "mfit/oracles.hpp"
#include "mfit/pointcloud.hpp"
#include "mfit/seeds.hpp"

namespace fs = std::filesystem;

namespace mfit {

StageError::StageError(std::string stage, const std::string& message)
    : ContractError("[" + stage + "] " + message), stage_(std::move(stage)) {}

namespace {

template <typename F>
auto in_stage(const char* name, F&& body) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const ContractError& e) {
    throw StageError(name, e.what());
  }
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ContractError("cannot create directory " + dir);
}

std::string join(const std::string& dir, const char* name) { return (fs::path(dir) / name).string(); }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ContractError("cannot write " + path);
  out << text;
  if (!out) throw ContractError("write failed: " + path);
}

}  // namespace

DatasetPaths cmd_generate(const ExperimentConfig& config, const std::string& out_dir) {
  return in_stage("generate", [&] {
    if (config.dataset_size <= 0) throw ContractError("dataset size must be positive");
    if (config.dataset_size > std::numeric_limits<int>::max()) {
      throw ContractError("dataset size exceeds the supported range");
    }
    const AnalyticManifold m = build_manifold(config.manifold);
    const std::uint64_t seed = derive_seed(config.master_seed, Stage::Generate);
    const NoisyDataset data =
        generate_observations(m, static_cast<int>(config.dataset_size), config.sigma, seed);
    ensure_dir(out_dir);
    DatasetPaths paths{join(out_dir, "clean.mfpc"), join(out_dir, "noisy.mfpc"),
                       join(out_dir, "manifest.json")};
    save_cloud(paths.clean, make_cloud(data.clean));
    save_cloud(paths.noisy, make_cloud(data.observed));
    nlohmann::json manifest;
    manifest["config"] = nlohmann::json::parse(config_to_json(config));
    manifest["seeds"] = {{"master", config.master_seed}, {"dataset", seed}};
    manifest["format"] = "MFPC1";
    write_text(paths.manifest, manifest.dump(2) + "\n");
    return paths;
  });
}

PipelineResult run_pipeline(const ExperimentConfig& config, const std::vector<Vec>& observations,
                            std::ostream& log) {
  log << std::setprecision(10);
  log << "mfit fit log\n";
  log << "config " << config_to_json(config);
  for (const std::string& key : config.constants.overridden) log << "override constants." << key << '\n';

  PipelineResult out;
  const AnalyticManifold m = in_stage("config", [&] { return build_manifold(config.manifold); });
  out.bounds = in_stage("config", [&] { return effective_bounds(config, m); });
  const int n = out.bounds.n;
  const int d = out.bounds.d;

  in_stage("pca", [&] {
    if (observations.empty()) throw ContractError("no observations");
    for (const Vec& x : observations) {
      if (x.size() != n) throw ContractError("observation dimension differs from the manifold's");
    }
    const long long D = config.pca_dim == 0 ? n : config.pca_dim;
    if (D > n || D <= d) throw ContractError("pca_dim must lie in (d, n]");
    if (D == n) {
      out.frame = Mat::Identity(n, n);
      out.offset = Vec::Zero(n);
      log << "pca: D = n = " << n << ", no reduction\n";
    } else {
      const PcaResult pca = pca_fit(observations, D);
      out.frame = pca.subspace.basis();
      out.offset = pca.mean;
      log << "pca: D = " << D << " from " << observations.size() << " observations\n";
    }
    return 0;
  });
  GeometricBounds reduced = out.bounds;
  reduced.n = static_cast<int>(out.frame.cols());

  std::unique_ptr<SupportSource> source;
  std::unique_ptr<OracleBudget> budget;
  in_stage("oracle", [&] {
    out.oracle = make_params(reduced, config.sigma, config.opt_eps / 4.0, config.eta);
    log << "oracle: mode " << to_string(config.mode) << ", find-distance eps "
        << out.oracle.eps << ", delta " << out.oracle.delta << '\n';
    log << "oracle: theoretical sample bound log10 N = " << theoretical_sample_bound(out.oracle)
        << '\n';
    if (config.mode == OracleMode::Exact) {
      source = std::make_unique<ExactSupportSource>(m, out.oracle, out.frame, out.offset);
      budget = std::make_unique<OracleBudget>(0, std::numeric_limits<long long>::max() / 2,
                                              config.eta);
      log << "oracle: exact slab averages, literal threshold log Gamma_delta = "
          << out.oracle.log_gamma_delta << '\n';
    } else {
      out.oracle = calibrate(out.oracle, config.samples_per_call,
                             {config.slab_count, config.calibration_phases});
      auto pts = std::make_shared<Mat>(reduced.n, static_cast<Eigen::Index>(observations.size()));
      for (std::size_t k = 0; k < observations.size(); ++k) {
        pts->col(static_cast<Eigen::Index>(k)) = out.frame.transpose() * (observations[k] - out.offset);
      }
      auto batch = std::make_unique<BatchSupportSource>(pts, config.samples_per_call, out.oracle);
      budget = std::make_unique<OracleBudget>(config.samples_per_call, batch->batch_count(),
                                              config.eta);
      log << "oracle: calibrated count N = " << config.samples_per_call << " per call, "
          << batch->batch_count() << " batches, slab count " << config.slab_count
          << ", r_delta " << out.oracle.r_delta << '\n';
      source = std::move(batch);
    }
    return 0;
  });

  in_stage("net", [&] {
    NetConstants k;
    k.C_cone = config.constants.C_cone;
    k.C_acc = config.constants.C_acc;
    k.sphere_net_cap = config.constants.sphere_net_cap;
    k.n0_cap = config.constants.n0_cap;
    out.net_params = net_params(reduced, config.eps, reduced.n, k);
    const NetParams& p = out.net_params;
    log << "net: L " << p.L << ", r1 " << p.r1 << ", delta " << p.delta << ", eps' "
        << p.eps_prime << ", sphere net " << p.script_N << " (formula " << p.script_N_estimate
        << "), N0 " << p.N0 << " (formula " << p.N0_formula << "), accept radius "
        << p.accept_radius << '\n';
    NetRunOptions run;
    run.opt_eps = config.opt_eps;
    run.cap_factor = config.constants.cap_factor;
    out.net = find_points(p, reduced, *source, *budget,
                          derive_seed(config.master_seed, Stage::FindPoints), run);
    out.oracle_calls = budget->used();
    for (NetEntry& e : out.net.entries) {
      if (e.point.size() == reduced.n) e.point = out.offset + out.frame * e.point;
      e.direction = out.frame * e.direction;
    }
    log << "net: accepted " << out.net.accepted << " of " << out.net.iterations << ", failures "
        << out.net.failures << ", acceptance rate " << out.net.acceptance_rate << " (bound "
        << out.net.acceptance_bound << "), oracle calls " << out.oracle_calls << '\n';
    return 0;
  });

  const DiscAtlas atlas = in_stage("atlas", [&] {
    AtlasOptions options;
    options.subnet_c = config.constants.subnet_c;
    options.radius_factor = config.constants.radius_factor;
    options.C_frob = config.constants.C_frob;
    const std::vector<Vec> pts = out.net.points();
    DiscAtlas a = build_atlas(pts, d, out.bounds.tau, options, &out.atlas_report);
    const AtlasReport& r = out.atlas_report;
    log << "atlas: " << r.discs << " discs at scale " << r.scale << ", radius " << a.radius
        << ", refined " << r.fine_tuned << ", degenerate " << r.degenerate << ", skipped "
        << r.skipped << ", projector gap " << r.max_projector_gap << " (bound "
        << r.projector_gap_bound << ")\n";
    return a;
  });

  const std::vector<double> weights = in_stage("weights", [&] {
    const std::vector<Vec> tube =
        atlas_tube_samples(atlas, 50, derive_seed(config.master_seed, Stage::Atlas));
    WeightOptions options;
    options.c_lo = config.constants.c_lo;
    options.C_w = config.constants.C_w;
    options.net_size = out.net.accepted;
    auto w = bump_weights_solve(atlas, tube, options, &out.weight_report);
    const WeightReport& r = out.weight_report;
    log << "weights: " << r.iterations << " sweeps, bump sum in [" << r.min_alpha << ", "
        << r.max_alpha << "], update operations " << r.update_operations << " (budget "
        << r.operation_budget << (r.within_budget ? ")" : ", exceeded)") << '\n';
    return w;
  });
  out.manifold = ImplicitManifold(atlas, weights, out.bounds);
  return out;
}

FitPaths cmd_fit(const ExperimentConfig& config, const std::string& data_dir,
                 const std::string& out_dir, PipelineResult* result) {
  const std::vector<Vec> observations = in_stage("load", [&] {
    const std::string path = join(data_dir, "noisy.mfpc");
    if (!fs::exists(path)) throw ContractError("dataset not found: " + path);
    return load_cloud(path).points();
  });
  in_stage("output", [&] {
    ensure_dir(out_dir);
    return 0;
  });
  FitPaths paths{join(out_dir, "net.mfpc"), join(out_dir, "manifold.txt"), join(out_dir, "fit.log")};
  std::ofstream log(paths.log, std::ios::binary);
  if (!log) throw StageError("output", "cannot write " + paths.log);
  const auto t0 = std::chrono::steady_clock::now();
  PipelineResult r;
  try {
    r = run_pipeline(config, observations, log);
  } catch (const StageError& e) {
    log << "error " << e.what() << '\n';
    throw;
  }
  in_stage("output", [&] {
    save_cloud(paths.net, net_cloud(r.net));
    save_implicit(paths.manifold, r.manifold);
    return 0;
  });
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  log << "done in " << secs << " s\n";
  if (result) *result = std::move(r);
  return paths;
}

bool MetricsReport::all_passed() const {
  for (const CheckRow& row : checks) {
    if (!row.passed) return false;
  }
  return true;
}

double MetricsReport::metric(const std::string& name) const {
  for (const auto& [key, value] : metrics) {
    if (key == name) return value;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::string MetricsReport::to_text() const {
  std::ostringstream out;
  out << std::setprecision(10);
  out << "mfit-report 1\n";
  out << "artifact " << artifact_kind << '\n';
  for (const auto& [key, value] : metrics) out << "metric " << key << ' ' << value << '\n';
  for (const CheckRow& row : checks) {
    out << "check " << row.name << ' ' << (row.passed ? "PASS" : "FAIL") << ' ' << row.detail << '\n';
  }
  out << "summary " << (all_passed() ? "PASS" : "FAIL") << '\n';
  return out.str();
}

double net_resolution(const AnalyticManifold& m, const std::vector<Vec>& points, int samples,
                      std::uint64_t seed) {
  if (points.empty()) throw ContractError("net_resolution: no points");
  const std::vector<Vec> truth = m.uniform_sample(samples, seed);
  double worst = directed_hausdorff(truth, points);
  for (const Vec& p : points) worst = std::max(worst, m.distance(p));
  return worst;
}

std::vector<CheckRow> implicit_property_checks(const ImplicitManifold& im,
                                            const std::vector<Vec>& points, double c_frob) {
  std::vector<CheckRow> rows;
  const int n = im.ambient_dim();
  const int d = im.dim();
  const std::size_t stride = std::max<std::size_t>(1, points.size() / 200);

  double pou = 0.0, idem = 0.0, sym = 0.0, rank = 0.0;
  std::string gap_error;
  for (std::size_t k = 0; k < points.size(); k += stride) {
    double total = 0.0;
    for (const auto& part : im.partition(points[k])) total += part.second;
    pou = std::max(pou, std::abs(total - 1.0));
    try {
      const FrecValue v = im.evaluate(points[k]);
      const Mat& p = v.projector;
      idem = std::max(idem, (p * p - p).norm());
      sym = std::max(sym, (p - p.transpose()).norm());
      rank = std::max(rank, std::abs(p.trace() - (n - d)));
    } catch (const ContractError& e) {
      if (gap_error.empty()) gap_error = e.what();
    }
  }
  std::ostringstream detail;
  detail << std::setprecision(3);
  detail << "max |sum alpha - 1| = " << pou;
  rows.push_back({"partition_of_unity", pou <= 1e-10, detail.str()});
  rows.push_back({"spectral_gap", gap_error.empty(), gap_error.empty() ? "all points" : gap_error});
  detail.str("");
  detail << "|P^2 - P| = " << idem << ", |P - P^T| = " << sym << ", |tr P - (n - d)| = " << rank;
  rows.push_back({"projector_idempotence", gap_error.empty() && idem <= 1e-9 && sym <= 1e-12 && rank <= 1e-9,
                  detail.str()});

  double contour = 0.0;
  bool contour_ok = gap_error.empty();
  for (int j = 0; j < 5 && !points.empty(); ++j) {
    const Vec& x = points[(points.size() * j) / 5];
    try {
      contour = std::max(contour, (contour_projector(im.averaged_projector(x)) - im.evaluate(x).projector).norm());
    } catch (const ContractError&) {
      contour_ok = false;
    }
  }
  detail.str("");
  detail << "max |P_eig - P_contour| = " << contour;
  rows.push_back({"spectral_contour_agreement", contour_ok && contour <= 1e-6, detail.str()});

  const double gap = max_projector_gap(im.atlas());
  const double bound = c_frob * d * 2.0 * im.atlas().radius / im.bounds().tau;
  detail.str("");
  detail << "max |P_i - P_j|_F = " << gap << " vs " << bound;
  rows.push_back({"projector_gap", gap < bound, detail.str()});
  return rows;
}

namespace {

std::string sniff(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ContractError("cannot read " + path);
  std::string head(16, '\0');
  in.read(head.data(), static_cast<std::streamsize>(head.size()));
  head.resize(static_cast<std::size_t>(in.gcount()));
  if (head.rfind("MFPC1", 0) == 0) return "cloud";
  if (head.rfind("mfit-implicit", 0) == 0) return "implicit";
  const auto first = head.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && head[first] == '{') return "config";
  throw FormatError("unrecognized artifact format: " + path);
}

void truth_checks(const ExperimentConfig& truth, const AnalyticManifold& m,
                  const std::vector<Vec>& sample, MetricsReport& report) {
  const GeometricBounds& b = m.bounds();
  std::vector<Subspace> tangents;
  for (const Vec& p : sample) tangents.push_back(m.tangent(p));
  const double reach = federer_reach_estimate(sample, tangents);
  report.metrics.emplace_back("truth_reach_estimate", reach);
  if (std::isfinite(b.tau)) {
    const double rel = std::abs(reach - b.tau) / b.tau;
    std::ostringstream detail;
    detail << "estimate " << reach << " vs tau " << b.tau;
    report.checks.push_back({"reach_oracle", rel <= 1e-2, detail.str()});
  }

  try {
    const SupportOracleParams params = make_params(b, truth.sigma, truth.opt_eps / 4.0, truth.eta);
    const int n = m.ambient_dim();
    std::vector<Vec> dirs = {Vec::Unit(n, 0), -Vec::Unit(n, 0), Vec::Unit(n, 1),
                             Vec::Ones(n).normalized()};
    int violations = 0, checks = 0;
    for (const Vec& dir : dirs) {
      const double s = m.support(dir);
      for (int k = 1; k <= 8; ++k) {
        const double gamma = s + 0.05 * k;
        const DistanceSandwich w = distance_sandwich(log_gamma_exact(m, truth.sigma, gamma, dir), params);
        ++checks;
        if (!(w.lower <= gamma - s && gamma - s <= w.upper)) ++violations;
      }
    }
    report.checks.push_back({"support_sandwich", violations == 0,
                             std::to_string(violations) + " of " + std::to_string(checks) + " outside"});
  } catch (const ContractError& e) {
    report.checks.push_back({"support_sandwich", false, e.what()});
  }

  const ManifoldKind kind = m.kind();
  if (kind == ManifoldKind::Circle || kind == ManifoldKind::Ellipse ||
      (kind == ManifoldKind::Sphere && m.dim() == m.ambient_dim() - 1)) {
    try {
      NetConstants k;
      k.C_cone = truth.constants.C_cone;
      k.C_acc = truth.constants.C_acc;
      const NetParams np = net_params(b, truth.eps, m.ambient_dim(), k);
      const FiberStabilityReport f = fiber_stability_check(m, 100, np);
      std::ostringstream detail;
      detail << "displacement ratio " << f.max_displacement_ratio << ", containment violations "
             << f.containment_violations;
      report.checks.push_back({"fiber_stability",
                               f.max_displacement_ratio <= 1.0 && f.containment_violations == 0,
                               detail.str()});
    } catch (const ContractError& e) {
      report.checks.push_back({"fiber_stability", false, e.what()});
    }
  }
}

void net_checks(const ExperimentConfig& truth, const AnalyticManifold& m,
                const ReconstructionNet& net, MetricsReport& report) {
  const GeometricBounds& b = m.bounds();
  const int D = m.ambient_dim();
  const double bound = std::pow(2.0, -2.0 * D) * std::pow(b.tau / b.R, D + b.d);
  const double sd = std::sqrt(bound * (1.0 - bound) / std::max<long long>(1, net.iterations));
  report.metrics.emplace_back("acceptance_rate", net.acceptance_rate);
  report.metrics.emplace_back("acceptance_bound", bound);
  std::ostringstream detail;
  detail << "rate " << net.acceptance_rate << " vs " << bound << " - 3 x " << sd;
  report.checks.push_back({"acceptance_rate", net.acceptance_rate >= bound - 3.0 * sd, detail.str()});
  try {
    NetConstants k;
    k.C_cone = truth.constants.C_cone;
    k.C_acc = truth.constants.C_acc;
    const NetParams np = net_params(b, truth.eps, D, k);
    double worst = 0.0;
    for (const NetEntry& e : net.entries) {
      if (!e.accepted) continue;
      worst = std::max(worst, (e.point - m.support_point(e.direction.normalized())).norm());
    }
    report.metrics.emplace_back("max_tester_error", worst);
    report.metrics.emplace_back("accept_radius", np.accept_radius);
    std::ostringstream d2;
    d2 << "max |y - x_v| = " << worst << " vs " << np.accept_radius;
    report.checks.push_back({"tester_safety", worst <= np.accept_radius, d2.str()});
  } catch (const ContractError& e) {
    report.checks.push_back({"tester_safety", false, e.what()});
  }
}

}  // namespace

MetricsReport cmd_evaluate(const ExperimentConfig& truth, const std::string& artifact_path) {
  const AnalyticManifold m = build_manifold(truth.manifold);
  const int n = m.ambient_dim();
  const std::vector<Vec> sample =
      m.uniform_sample(truth.eval_samples, derive_seed(truth.master_seed, Stage::Evaluate, 1));
  MetricsReport report;
  report.artifact_kind = sniff(artifact_path);

  if (report.artifact_kind == "config") {
    const ExperimentConfig other = load_config(artifact_path);
    const AnalyticManifold am = build_manifold(other.manifold);
    if (am.ambient_dim() != n || am.dim() != m.dim()) throw ContractError("evaluate: mismatched dimensions");
    const std::vector<Vec> asample =
        am.uniform_sample(truth.eval_samples, derive_seed(truth.master_seed, Stage::Evaluate, 1));
    report.metrics.emplace_back("hausdorff", hausdorff_distance(asample, sample));
  } else if (report.artifact_kind == "cloud") {
    const PointCloud cloud = load_cloud(artifact_path);
    if (cloud.dim != n) throw ContractError("evaluate: mismatched dimensions");
    std::vector<Vec> pts;
    if (is_net_cloud(cloud)) {
      report.artifact_kind = "net";
      const ReconstructionNet net = net_from_cloud(cloud);
      pts = net.points();
      net_checks(truth, m, net, report);
    } else {
      pts = cloud.points();
    }
    if (pts.empty()) throw ContractError("evaluate: artifact has no points");
    double to_truth = 0.0;
    for (const Vec& p : pts) to_truth = std::max(to_truth, m.distance(p));
    const double from_truth = directed_hausdorff(sample, pts);
    report.metrics.emplace_back("to_truth", to_truth);
    report.metrics.emplace_back("from_truth", from_truth);
    report.metrics.emplace_back("hausdorff", std::max(to_truth, from_truth));
  } else {
    const ImplicitManifold im = load_implicit(artifact_path);
    if (im.ambient_dim() != n || im.dim() != m.dim()) throw ContractError("evaluate: mismatched dimensions");
    ReconstructionOptions options;
    options.seeds = truth.eval_samples;
    options.seed = truth.master_seed;
    const ReconstructionMetrics r = evaluate_reconstruction(im, m, options);
    report.metrics.emplace_back("hausdorff", r.hausdorff);
    report.metrics.emplace_back("to_truth", r.to_truth);
    report.metrics.emplace_back("from_truth", r.from_truth);
    report.metrics.emplace_back("mean_offset", r.mean_offset);
    report.metrics.emplace_back("reach_estimate", r.reach);
    report.metrics.emplace_back("reach_target", r.reach_target);
    report.metrics.emplace_back("reach_ratio", r.reach_ratio);
    std::ostringstream detail;
    detail << "estimate " << r.reach << " vs 0.2 tau = " << 0.2 * m.bounds().tau;
    report.checks.push_back({"output_reach", r.reach > 0.2 * m.bounds().tau, detail.str()});
    for (CheckRow& row : implicit_property_checks(im, r.points, truth.constants.C_frob)) {
      report.checks.push_back(std::move(row));
    }
    const fs::path net_path = fs::path(artifact_path).parent_path() / "net.mfpc";
    if (fs::exists(net_path)) {
      const PointCloud cloud = load_cloud(net_path.string());
      if (cloud.dim == n && is_net_cloud(cloud)) {
        const ReconstructionNet net = net_from_cloud(cloud);
        const double res = net_resolution(m, net.points(), truth.eval_samples,
                                          derive_seed(truth.master_seed, Stage::Evaluate, 2));
        report.metrics.emplace_back("net_resolution", res);
        std::ostringstream d2;
        d2 << "d_H " << r.hausdorff << " vs 5 x " << res;
        report.checks.push_back({"hausdorff_vs_net", r.hausdorff < 5.0 * res, d2.str()});
        net_checks(truth, m, net, report);
      }
    }
  }
  truth_checks(truth, m, sample, report);
  return report;
}

}  // namespace mfit
