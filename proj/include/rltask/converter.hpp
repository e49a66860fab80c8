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

// Adapters between the system view of device placement (op graph, device
// names, simulated runtimes) and the agent view (layout values, action
// indices, scalar rewards).

#ifndef RLTASK_CONVERTER_HPP_
#define RLTASK_CONVERTER_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "rltask/graph.hpp"
#include "rltask/simulator.hpp"
#include "rltask/spaces.hpp"

namespace rltask {

// Sequential traversal state: ops with id < current_op_index are the placed
// ones when traversing op by op.
struct SystemState {
  const CompGraph* graph = nullptr;
  int current_op_index = 0;
  std::vector<int> partial_placement;  // op id -> device index, -1 unplaced
};

struct SystemMetrics {
  double run_time = 0.0;
  bool valid = true;
  std::map<std::string, std::int64_t> peak_memory_per_device;
};

SystemMetrics to_system_metrics(const SimMetrics& sim,
                                const DeviceSet& devices);

// reward' = scale * reward + shift. Identity by default.
struct RewardTransform {
  double scale = 1.0;
  double shift = 0.0;
  double apply(double reward) const { return scale * reward + shift; }
  bool is_identity() const { return scale == 1.0 && shift == 0.0; }
};

struct ConverterOptions {
  double invalid_penalty = kDefaultInvalidPenalty;
  RewardTransform reward_transform;
};

// First `k` producer (resp. consumer) ids of `op` in ascending order, padded
// with -1.
std::vector<int> input_neighbors(const CompGraph& graph, int op, int k);
std::vector<int> output_neighbors(const CompGraph& graph, int op, int k);

class PlacementConverter {
 public:
  explicit PlacementConverter(SchemaLayout schema,
                              ConverterOptions options = {});

  const SchemaLayout& schema() const { return schema_; }
  const ConverterOptions& options() const { return options_; }

  // Graph variant: per-op rows (is_current_node, is_placed, device one-hot)
  // with an all-zero device block for unplaced ops, the current op index,
  // and neighbor index tables for every op. Recurrent variant: the device
  // one-hot rows alone.
  Value system_to_agent_state(const SystemState& state) const;

  std::int64_t system_to_agent_action(std::string_view device_name) const;
  const std::string& agent_to_system_action(std::int64_t action) const;

  // -run_time, through the reward transform. Invalid placements carry the
  // penalty as their run time.
  double system_to_agent_reward(const SystemMetrics& metrics) const;

 private:
  SchemaLayout schema_;
  ConverterOptions options_;
  std::map<std::string, std::int64_t, std::less<>> device_index_;
};

}  // namespace rltask

#endif  // RLTASK_CONVERTER_HPP_
