// Copyright 2026 The rltask Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// rltask command-line interface.
//
//   rltask run <config.json> [--seed N]
//   rltask evaluate <dir>... [--instances trials|<file>] [--out DIR]
//   rltask classify <results.csv> [--threshold 0.30] [--class K] [--best]
//   rltask report <dir>
//   rltask validate <config.json> [--seed N]
//
// Exit status: 0 on success, 1 on a library error (reported as one JSON line
// on stderr), 2 on usage errors.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rltask/classification.hpp"
#include "rltask/config.hpp"
#include "rltask/error.hpp"
#include "rltask/kernels.hpp"
#include "rltask/workflow.hpp"

namespace {

using namespace rltask;

void print_error(const std::string& kind, const std::string& message) {
  nlohmann::json err = {{"error", kind}, {"message", message}};
  std::cerr << err.dump() << "\n";
}

std::string percent(double fraction) {
  return format_fixed(100.0 * fraction, 2) + "%";
}

ExperimentConfig load_with_seed(const std::string& path,
                                const std::optional<std::uint64_t>& seed) {
  ExperimentConfig c = load_config(path);
  if (seed) c.master_seed = *seed;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical RL device placement experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "rltask 1.0");

  std::string config_path;
  std::optional<std::uint64_t> seed;
  bool verbose = false;
  auto* run = app.add_subcommand("run", "train all trials of an experiment");
  run->add_option("config", config_path, "experiment config (JSON)")->required();
  run->add_option("--seed", seed, "override the master seed");
  run->add_flag("-v,--verbose", verbose, "log trial progress to stderr");

  std::vector<std::string> dirs;
  std::string instances = "trials";
  std::string out_dir;
  double threshold = kDefaultThreshold;
  int klass = 4;
  auto* evaluate = app.add_subcommand(
      "evaluate", "cross-evaluate trained checkpoints (greedy actions)");
  evaluate->add_option("dirs", dirs, "experiment directories")->required();
  evaluate->add_option("--instances", instances,
                       "'trials' or a JSON file of instance provenance");
  evaluate->add_option("--out", out_dir, "output directory for matrix.csv");
  evaluate->add_option("--threshold", threshold, "success threshold");
  evaluate->add_option("--class", klass, "class index for the record")
      ->check(CLI::Range(0, 6));

  std::string csv_path;
  bool use_best = false;
  int classify_k = 1;
  double classify_threshold = kDefaultThreshold;
  auto* classify_cmd =
      app.add_subcommand("classify", "classification record from a CSV");
  classify_cmd->add_option("results", csv_path, "results CSV")->required();
  classify_cmd->add_option("--threshold", classify_threshold,
                           "success threshold (inclusive)");
  classify_cmd->add_option("--class", classify_k, "class index")
      ->check(CLI::Range(0, 6));
  classify_cmd->add_flag("--best", use_best,
                         "classify on best-seen instead of final improvement");

  std::string report_dir;
  auto* report_cmd = app.add_subcommand(
      "report", "summary tables and improvement curves as CSV");
  report_cmd->add_option("dir", report_dir, "experiment directory")->required();

  auto* validate_cmd = app.add_subcommand("validate", "check a config");
  validate_cmd->add_option("config", config_path, "experiment config (JSON)")
      ->required();
  validate_cmd->add_option("--seed", seed, "override the master seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*run) {
      const ExperimentConfig c = load_with_seed(config_path, seed);
      WorkflowOptions opt;
      if (verbose) {
        opt.log = &std::cerr;
        std::cerr << "kernels: " << kernels::isa_name(kernels::active_isa())
                  << "\n";
      }
      const WorkflowResult r = run_workflow(c, opt);
      std::cout << r.summary.at("record").get<std::string>() << "\n"
                << "directory " << r.dir.string() << "\n"
                << "config_hash " << r.summary.at("config_hash").get<std::string>()
                << "\n"
                << "mean final improvement "
                << percent(r.summary.at("improvement_final").at("mean"))
                << " (std "
                << percent(r.summary.at("improvement_final").at("std"))
                << ")\n";
      return 0;
    }
    if (*evaluate) {
      const EvaluateResult r =
          evaluate_checkpoints(dirs, instances, out_dir, threshold, klass);
      for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
      std::cout << r.formatted << "\n"
                << "matrix " << r.matrix_csv.string() << "\n";
      return 0;
    }
    if (*classify_cmd) {
      const ClassifyReport r = classify_results_csv(csv_path, classify_threshold,
                                                    classify_k, use_best);
      std::cout << r.formatted << "\n"
                << "successes " << r.record.successes << "/" << r.record.s
                << " (" << r.record.criterion << ")\n"
                << "mean final improvement "
                << percent(r.improvement_final.mean) << " (std "
                << percent(r.improvement_final.std) << ")\n";
      if (r.has_best) {
        std::cout << "mean best improvement "
                  << percent(r.improvement_best.mean) << " (std "
                  << percent(r.improvement_best.std) << ")\n";
      }
      if (r.n_flagged) {
        std::cerr << "warning: trials disagree on n (" << r.record.n_min
                  << ".." << r.record.n_max << ")\n";
      }
      return 0;
    }
    if (*report_cmd) {
      const ReportResult r = report(report_dir);
      std::cout << "report " << r.out_dir.string() << "\n"
                << "curve rows " << r.curve_rows << "\n"
                << "mean final improvement "
                << percent(r.improvement_final.mean) << " (std "
                << percent(r.improvement_final.std) << ")\n";
      return 0;
    }
    if (*validate_cmd) {
      const ExperimentConfig c = load_with_seed(config_path, seed);
      validate(c);
      std::cout << "ok " << config_hash(c) << "\n";
      return 0;
    }
  } catch (const Error& e) {
    print_error(e.kind(), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("error", e.what());
    return 1;
  }
  return 2;
}
