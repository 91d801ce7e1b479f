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


// Command-line front end: generate, fit, evaluate.

#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "mfit/config.hpp"
#include "mfit/errors.hpp"
#include "mfit/pipeline.hpp"

namespace {

constexpr int kContractFailure = 1;
constexpr int kUsageError = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mfit: manifold fitting from noisy samples"};
  app.require_subcommand(1);

  std::string config_path, out_dir, data_dir, truth_path, artifact_path, report_path;

  auto* gen = app.add_subcommand("generate", "sample clean and noisy point clouds");
  gen->add_option("--config", config_path, "experiment config (JSON)")->required();
  gen->add_option("--out", out_dir, "output directory")->required();

  auto* fit = app.add_subcommand("fit", "run the reconstruction pipeline on a dataset");
  fit->add_option("--config", config_path, "experiment config (JSON)")->required();
  fit->add_option("--data", data_dir, "directory written by generate")->required();
  fit->add_option("--out", out_dir, "output directory")->required();

  auto* eval = app.add_subcommand("evaluate", "compare an artifact with the ground truth");
  eval->add_option("--truth", truth_path, "truth config (JSON)")->required();
  eval->add_option("--artifact", artifact_path, "net, point cloud, manifold or config file")
      ->required();
  eval->add_option("--report", report_path, "report output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*gen) {
      const mfit::DatasetPaths p = mfit::cmd_generate(mfit::load_config(config_path), out_dir);
      std::cout << "wrote " << p.clean << "\nwrote " << p.noisy << "\nwrote " << p.manifest << '\n';
    } else if (*fit) {
      const mfit::FitPaths p = mfit::cmd_fit(mfit::load_config(config_path), data_dir, out_dir);
      std::cout << "wrote " << p.net << "\nwrote " << p.manifold << "\nwrote " << p.log << '\n';
    } else if (*eval) {
      const mfit::MetricsReport r = mfit::cmd_evaluate(mfit::load_config(truth_path), artifact_path);
      const std::string text = r.to_text();
      std::ofstream out(report_path, std::ios::binary);
      if (!out || !(out << text)) throw mfit::ContractError("cannot write " + report_path);
      std::cout << text;
    }
  } catch (const mfit::ContractError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kContractFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kContractFailure;
  }
  return 0;
}
