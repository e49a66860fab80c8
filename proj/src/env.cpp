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

#include "rltask/env.hpp"

#include <algorithm>

#include "rltask/error.hpp"

namespace rltask {

std::string_view reward_mode_name(RewardMode mode) {
  return mode == RewardMode::kIncremental ? "incremental" : "terminal";
}

RewardMode parse_reward_mode(std::string_view name) {
  if (name == "incremental") return RewardMode::kIncremental;
  if (name == "terminal") return RewardMode::kTerminal;
  throw ConfigError("unknown reward mode '" + std::string(name) + "'");
}

Grouping Grouping::identity(std::size_t num_ops) {
  Grouping g;
  g.num_groups = static_cast<int>(num_ops);
  g.group_of_op.resize(num_ops);
  for (std::size_t i = 0; i < num_ops; ++i) g.group_of_op[i] = static_cast<int>(i);
  return g;
}

std::vector<std::vector<int>> Grouping::members() const {
  std::vector<std::vector<int>> out(num_groups);
  for (std::size_t op = 0; op < group_of_op.size(); ++op) {
    out[group_of_op[op]].push_back(static_cast<int>(op));
  }
  return out;
}

std::vector<int> Grouping::placement_order() const {
  std::vector<int> first(num_groups, -1);
  for (std::size_t op = 0; op < group_of_op.size(); ++op) {
    int& f = first[group_of_op[op]];
    if (f < 0) f = static_cast<int>(op);
  }
  std::vector<int> order;
  for (int g = 0; g < num_groups; ++g) {
    if (first[g] >= 0) order.push_back(g);
  }
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return first[a] < first[b]; });
  return order;
}

PlacementEnv::PlacementEnv(const CompGraph& graph, const DeviceSet& devices,
                           EnvOptions options, RngStream noise)
    : graph_(&graph), devices_(&devices), options_(options), noise_(noise) {
  if (options_.groups_per_evaluation < 1) {
    throw ConfigError("groups_per_evaluation must be >= 1");
  }
  devices.validate();
}

SystemState PlacementEnv::reset() {
  return reset(Grouping::identity(graph_->num_ops()));
}

SystemState PlacementEnv::reset(Grouping grouping) {
  const std::size_t n = graph_->num_ops();
  if (grouping.group_of_op.size() != n) {
    throw StructureError("grouping covers " +
                         std::to_string(grouping.group_of_op.size()) +
                         " ops, graph has " + std::to_string(n));
  }
  for (int g : grouping.group_of_op) {
    if (g < 0 || g >= grouping.num_groups) {
      throw StructureError("group index " + std::to_string(g) +
                           " out of range");
    }
  }
  grouping_ = std::move(grouping);
  members_ = grouping_.members();
  order_ = grouping_.placement_order();
  group_device_.assign(grouping_.num_groups, -1);
  next_ = 0;
  placement_ = single_device_placement(*graph_, 0);
  // The baseline measurement is not counted against the evaluation budget.
  SimOptions opts{options_.invalid_penalty, 0.0, nullptr};
  initial_run_time_ = simulate_runtime(*graph_, placement_, *devices_, opts).run_time;
  last_run_time_ = initial_run_time_;
  started_ = true;
  return system_state();
}

std::size_t PlacementEnv::decisions_for_next_step() const {
  return std::min<std::size_t>(options_.groups_per_evaluation,
                               groups_remaining());
}

int PlacementEnv::current_group() const {
  return done() ? -1 : order_[next_];
}

SimMetrics PlacementEnv::evaluate() {
  SimOptions opts{options_.invalid_penalty, options_.noise_sigma, &noise_};
  ++evaluations_;
  return simulate_runtime(*graph_, placement_, *devices_, opts);
}

StepResult PlacementEnv::step(std::span<const int> decisions) {
  if (!started_) throw StructureError("step before reset");
  if (done()) throw StructureError("step after episode is done");
  const std::size_t k = decisions_for_next_step();
  if (decisions.size() != k) {
    throw StructureError("expected " + std::to_string(k) +
                         " decisions, got " + std::to_string(decisions.size()));
  }
  const int nd = static_cast<int>(devices_->size());
  for (int d : decisions) {
    if (d < 0 || d >= nd) {
      throw StructureError("device index " + std::to_string(d) +
                           " out of range");
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    const int g = order_[next_ + i];
    group_device_[g] = decisions[i];
    for (int op : members_[g]) placement_.assignment[op] = decisions[i];
  }
  next_ += k;
  ++transitions_;

  StepResult out;
  out.metrics = evaluate();
  last_metrics_ = out.metrics;
  const double previous = last_run_time_;
  last_run_time_ = out.metrics.run_time;
  out.done = done();
  const RewardTransform& t = options_.reward_transform;
  if (options_.reward_mode == RewardMode::kIncremental) {
    // scale * (-new) - scale * (-prev): telescopes to scale * (init - final)
    out.reward = t.scale * (previous - last_run_time_);
  } else {
    out.reward = out.done ? t.apply(-last_run_time_) : 0.0;
  }
  out.state = system_state();
  return out;
}

SystemState PlacementEnv::system_state() const {
  SystemState s;
  s.graph = graph_;
  s.partial_placement.assign(graph_->num_ops(), -1);
  for (int g = 0; g < grouping_.num_groups; ++g) {
    if (group_device_.empty() || group_device_[g] < 0) continue;
    for (int op : members_[g]) s.partial_placement[op] = group_device_[g];
  }
  if (done()) {
    s.current_op_index = static_cast<int>(graph_->num_ops()) - 1;
  } else {
    s.current_op_index = members_[order_[next_]].front();
  }
  return s;
}

}  // namespace rltask
