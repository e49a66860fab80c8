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

// Experiment orchestration and on-disk artifacts.
//
// <root>/<experiment_id>/
//   config.json                 config + config_hash
//   trials/trial_NNN/steps.csv  per-evaluation metrics
//   trials/trial_NNN/checkpoint.json
//   trials/trial_NNN/result.json   written last; marks the trial complete
//   results.csv                 all trials, one row per (trial, step)
//   summary.json                classification record and aggregates
//
// <root> is $RLTASK_OUTPUT_ROOT when set, else the config's output_dir.

#ifndef RLTASK_WORKFLOW_HPP_
#define RLTASK_WORKFLOW_HPP_

#include <cstddef>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "rltask/classification.hpp"
#include "rltask/config.hpp"
#include "rltask/protocol.hpp"

namespace rltask {

inline constexpr const char* kOutputRootEnv = "RLTASK_OUTPUT_ROOT";

std::filesystem::path experiment_dir(const ExperimentConfig& config);

struct WorkflowOptions {
  // Stop after this many trials have been completed in this call, leaving
  // the run unfinished (used to exercise resumption).
  std::size_t max_new_trials = std::numeric_limits<std::size_t>::max();
  std::ostream* log = nullptr;
};

struct WorkflowResult {
  std::filesystem::path dir;
  nlohmann::json summary;  // empty when the run is unfinished
  std::size_t trials_run = 0;
  std::size_t trials_resumed = 0;
  bool finished = false;
};

WorkflowResult run_workflow(const ExperimentConfig& config,
                            const WorkflowOptions& options = {});

struct ClassifyReport {
  ClassificationRecord record;
  std::string formatted;
  Aggregate improvement_final;
  Aggregate improvement_best;
  bool has_best = false;
  bool n_flagged = false;  // trials disagree on n
};

// Accepts results.csv or any CSV with columns trial, improvement_final, n
// (and optionally improvement_best); rows are collapsed to one per trial.
ClassifyReport classify_results_csv(const std::string& path, double threshold,
                                    int k, bool use_best = false);

struct EvaluateResult {
  GeneralizationMatrix matrix;
  ClassificationRecord record;
  std::string formatted;
  std::vector<std::string> warnings;
  std::filesystem::path matrix_csv;
};

// Models are every trial checkpoint under `dirs`, in order. `instances` is
// "trials" (the models' own training instances) or a JSON file holding an
// array of instance provenance objects.
EvaluateResult evaluate_checkpoints(const std::vector<std::string>& dirs,
                                    const std::string& instances,
                                    const std::string& out_dir,
                                    double threshold = kDefaultThreshold,
                                    int k = 4);

struct ReportResult {
  std::filesystem::path out_dir;
  std::string config_hash;
  std::size_t curve_rows = 0;
  Aggregate improvement_final;
  Aggregate improvement_best;
};

// Writes report/{curves,trials,aggregate}.csv; refuses directories whose
// artifacts carry different config hashes.
ReportResult report(const std::string& dir);

}  // namespace rltask

#endif  // RLTASK_WORKFLOW_HPP_
