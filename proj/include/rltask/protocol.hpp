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

// Progressive randomization: the C0..C6 class ladder, per-trial seed plans,
// trial execution, cross-graph generalization matrices and de-escalation.

#ifndef RLTASK_PROTOCOL_HPP_
#define RLTASK_PROTOCOL_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rltask/config.hpp"
#include "rltask/hierarchical.hpp"
#include "rltask/instance.hpp"

namespace rltask {

enum class SeedMode { kFixed, kRandom };

std::string_view seed_mode_name(SeedMode mode);

struct ProtocolClass {
  int k = 0;
  SeedMode seed_mode = SeedMode::kFixed;
  WorkloadMode workload_mode = WorkloadMode::kFixedBlackbox;
};

// C0 (fixed, fixed-blackbox), C1 (random, fixed-blackbox),
// C2 (random, randomized-blackbox), C3 (random, fixed-in-dist),
// C4 (random, randomized-in-dist), C5 (random, fixed-out-of-dist),
// C6 (random, randomized-out-of-dist).
const std::array<ProtocolClass, 7>& class_table();
const ProtocolClass& protocol_class(int k);
int class_index(SeedMode seed_mode, WorkloadMode workload_mode);

// Workload streams always come from (master, trial). Optimization streams
// (weight init, action sampling, minibatch, measurement noise) come from
// (master, trial) in random seed mode and from (pinned seed, 0) in fixed
// mode, so every trial of a fixed-seed class sees the same draws.
struct SeedPlan {
  std::uint64_t master = 0;
  std::uint64_t pinned_optimization_seed = 1234;
  SeedMode seed_mode = SeedMode::kRandom;

  std::uint64_t seed(std::size_t trial, StreamRole role) const;
  RngStream stream(std::size_t trial, StreamRole role) const {
    return RngStream(seed(trial, role));
  }
};

struct TrialResult {
  std::size_t trial = 0;
  int class_k = 0;
  std::map<std::string, std::uint64_t> seeds;  // role name -> stream seed
  nlohmann::json instance;                     // training instance provenance
  std::vector<nlohmann::json> test_instances;
  TrainResult train;
  double greedy_improvement = 0.0;  // training instance, after training
  std::vector<double> test_improvements;
  // Criterion inputs: for generalization classes the final value is the mean
  // greedy improvement on the test instances.
  double improvement_final = 0.0;
  double improvement_best = 0.0;
  std::size_t n = 0;
  nlohmann::json checkpoint;
};

// Summary form without per-step metrics or the checkpoint.
nlohmann::json summary_json(const TrialResult& result);

TrialResult run_trial(const ExperimentConfig& config, std::size_t trial);

std::vector<TrialResult> run_protocol_class(const ExperimentConfig& config,
                                            int k, std::size_t s,
                                            std::size_t budget);

ClassificationRecord classify_trials(const std::vector<TrialResult>& results,
                                     double threshold, int k,
                                     bool use_best = false);

struct MatrixCell {
  std::optional<double> improvement;
  std::string error;  // set when the cell is absent
};

struct GeneralizationMatrix {
  std::vector<std::string> model_ids;
  std::vector<std::string> instance_ids;
  std::vector<std::vector<MatrixCell>> cells;  // [model][instance]

  std::vector<double> present() const;
};

// Null models mark missing checkpoints; their rows are absent.
GeneralizationMatrix generalization_matrix(
    const std::vector<const HierarchicalAgent*>& models,
    const std::vector<std::string>& model_ids,
    const std::vector<TaskInstance>& instances,
    const std::vector<std::string>& instance_ids,
    double invalid_penalty = kDefaultInvalidPenalty);

// Config one class lower that reproduces the failing trial's training
// instance exactly, with fresh optimization seeds.
ExperimentConfig de_escalate(const ExperimentConfig& config,
                             const TrialResult& failed,
                             std::size_t trials = 10);

}  // namespace rltask

#endif  // RLTASK_PROTOCOL_HPP_
