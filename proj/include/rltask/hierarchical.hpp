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

// Two-level placement agent. The grouper assigns every op to one of
// num_groups groups; the placer then walks the non-empty groups in order of
// their lowest op id and picks a device for each, triggering a simulator
// evaluation every groups_per_evaluation decisions. Both levels learn with
// PPO on their own update counters.

#ifndef RLTASK_HIERARCHICAL_HPP_
#define RLTASK_HIERARCHICAL_HPP_

#include <cstddef>
#include <vector>

#include <json.hpp>

#include "rltask/categorical.hpp"
#include "rltask/env.hpp"
#include "rltask/grouper.hpp"
#include "rltask/placer.hpp"
#include "rltask/ppo.hpp"
#include "rltask/task_graph.hpp"

namespace rltask {

inline double relative_improvement(double initial, double achieved) {
  return (initial - achieved) / initial;
}

struct TrainOptions {
  std::size_t budget = 1000;  // graph evaluations
  int final_window = 10;      // episode-final evaluations averaged at the end
  int patience = 0;           // stop after this many evaluations without a
                              // new best; 0 disables
  RewardMode reward_mode = RewardMode::kIncremental;
  double invalid_penalty = kDefaultInvalidPenalty;
  double noise_sigma = 0.0;
  RewardTransform reward_transform;
  bool train_grouper = true;
  bool train_placer = true;
};

struct StepRecord {
  std::size_t step = 0;  // 1-based evaluation index
  std::size_t episode = 0;
  double run_time = 0.0;
  bool valid = true;
  bool episode_end = false;
};

struct TrainResult {
  double initial_run_time = 0.0;
  std::vector<StepRecord> steps;
  double best_run_time = 0.0;
  double final_run_time = 0.0;  // mean over the final window
  double improvement_best = 0.0;
  double improvement_final = 0.0;
  std::size_t transitions = 0;  // env steps
  std::size_t evaluations = 0;
  std::size_t episodes = 0;
  std::size_t invalid_evaluations = 0;
  std::size_t grouper_updates = 0;
  std::size_t placer_updates = 0;
  bool diverged = false;
  bool stopped_early = false;
  PpoStats grouper_stats;
  PpoStats placer_stats;
};

struct GreedyEvaluation {
  Placement placement;
  double initial_run_time = 0.0;
  double run_time = 0.0;
  bool valid = true;
  double improvement = 0.0;
};

class HierarchicalAgent {
 public:
  HierarchicalAgent(std::size_t num_devices, AgentConfig grouper,
                    AgentConfig placer, RngStream& weight_init);

  TrainResult train(const CompGraph& graph, const DeviceSet& devices,
                    const TrainOptions& options, RngStream& actions,
                    RngStream& minibatch, RngStream& noise);

  // Inference graph: "grouper" takes the op feature tensor and emits a group
  // per op; its output passes through the placer's pre-transform into the
  // grouped-graph state, and "placer" emits a device per op.
  TaskGraphSpec task_graph(const CompGraph& graph, SampleMode mode) const;
  Placement place(const CompGraph& graph, const DeviceSet& devices,
                  SampleMode mode, RngStream& rng) const;
  GreedyEvaluation evaluate_greedy(const CompGraph& graph,
                                   const DeviceSet& devices,
                                   double invalid_penalty =
                                       kDefaultInvalidPenalty) const;

  const AgentConfig& grouper_config() const { return gcfg_; }
  const AgentConfig& placer_config() const { return pcfg_; }
  const GrouperNet& grouper_net() const { return grouper_; }
  const PlacerNet& placer_net() const { return placer_; }
  const PolicyParams& grouper_params() const { return gparams_; }
  const PolicyParams& placer_params() const { return pparams_; }
  PolicyParams& grouper_params() { return gparams_; }
  PolicyParams& placer_params() { return pparams_; }
  std::size_t num_devices() const { return num_devices_; }
  std::size_t grouper_updates() const { return g_updates_; }
  std::size_t placer_updates() const { return p_updates_; }

  nlohmann::json checkpoint() const;
  static HierarchicalAgent from_checkpoint(const nlohmann::json& doc);

 private:
  std::size_t num_devices_;
  AgentConfig gcfg_;
  AgentConfig pcfg_;
  GrouperNet grouper_;
  PlacerNet placer_;
  PolicyParams gparams_;
  PolicyParams pparams_;
  AdamOptimizer gopt_;
  AdamOptimizer popt_;
  std::size_t g_updates_ = 0;
  std::size_t p_updates_ = 0;
};

}  // namespace rltask

#endif  // RLTASK_HIERARCHICAL_HPP_
