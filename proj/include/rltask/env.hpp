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

// Sequential placement environment. Ops are partitioned into groups; the
// agent assigns devices to groups in order, and every `groups_per_evaluation`
// decisions the current full placement is simulated. Groups not yet visited
// stay on device 0 (the initial single-device placement).

#ifndef RLTASK_ENV_HPP_
#define RLTASK_ENV_HPP_

#include <span>
#include <vector>

#include "rltask/converter.hpp"
#include "rltask/simulator.hpp"

namespace rltask {

enum class RewardMode { kIncremental, kTerminal };

std::string_view reward_mode_name(RewardMode mode);
RewardMode parse_reward_mode(std::string_view name);

struct Grouping {
  int num_groups = 0;
  std::vector<int> group_of_op;

  static Grouping identity(std::size_t num_ops);
  std::vector<std::vector<int>> members() const;
  // Non-empty groups ordered by their smallest member id.
  std::vector<int> placement_order() const;
};

struct EnvOptions {
  RewardMode reward_mode = RewardMode::kIncremental;
  int groups_per_evaluation = 10;
  double invalid_penalty = kDefaultInvalidPenalty;
  double noise_sigma = 0.0;
  RewardTransform reward_transform;
};

struct StepResult {
  SystemState state;
  double reward = 0.0;
  bool done = false;
  SimMetrics metrics;
};

class PlacementEnv {
 public:
  PlacementEnv(const CompGraph& graph, const DeviceSet& devices,
               EnvOptions options = {}, RngStream noise = RngStream(0));

  // Op-level traversal (every op its own group).
  SystemState reset();
  SystemState reset(Grouping grouping);

  // Places the next min(K, remaining) groups. decisions.size() must equal
  // that count.
  StepResult step(std::span<const int> decisions);

  bool done() const { return next_ >= order_.size(); }
  std::size_t groups_remaining() const { return order_.size() - next_; }
  std::size_t decisions_for_next_step() const;
  // Group to be placed next; -1 when done.
  int current_group() const;
  const Grouping& grouping() const { return grouping_; }
  const std::vector<int>& group_order() const { return order_; }
  const std::vector<int>& group_device() const { return group_device_; }

  const Placement& placement() const { return placement_; }
  double initial_run_time() const { return initial_run_time_; }
  double last_run_time() const { return last_run_time_; }
  const SimMetrics& last_metrics() const { return last_metrics_; }
  std::size_t evaluations() const { return evaluations_; }
  std::size_t transitions() const { return transitions_; }

  const CompGraph& graph() const { return *graph_; }
  const DeviceSet& devices() const { return *devices_; }
  const EnvOptions& options() const { return options_; }

  SystemState system_state() const;

 private:
  SimMetrics evaluate();

  const CompGraph* graph_;
  const DeviceSet* devices_;
  EnvOptions options_;
  RngStream noise_;
  Grouping grouping_;
  std::vector<std::vector<int>> members_;
  std::vector<int> order_;
  std::vector<int> group_device_;  // -1 until placed
  std::size_t next_ = 0;
  Placement placement_;
  double initial_run_time_ = 0.0;
  double last_run_time_ = 0.0;
  SimMetrics last_metrics_;
  std::size_t evaluations_ = 0;
  std::size_t transitions_ = 0;
  bool started_ = false;
};

}  // namespace rltask

#endif  // RLTASK_ENV_HPP_
