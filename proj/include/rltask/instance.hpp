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

// Task instances and the workload-randomization modes that produce them.

#ifndef RLTASK_INSTANCE_HPP_
#define RLTASK_INSTANCE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rltask/graph.hpp"
#include "rltask/simulator.hpp"

namespace rltask {

enum class WorkloadMode {
  kFixedBlackbox,
  kRandomizedBlackbox,
  kFixedInDistribution,
  kRandomizedInDistribution,
  kFixedOutOfDistribution,
  kRandomizedOutOfDistribution,
};

std::string_view workload_mode_name(WorkloadMode mode);
WorkloadMode parse_workload_mode(std::string_view name);
bool is_fixed(WorkloadMode mode);
bool is_generalization(WorkloadMode mode);

struct IntRange {
  int lo = 0;
  int hi = 0;  // inclusive
  bool operator==(const IntRange&) const = default;
};

// Training distribution plus the pinned seeds fixed modes reuse.
struct DistributionSpec {
  GraphFamily family = GraphFamily::kNmtLike;
  GraphParams base;  // used verbatim by fixed-blackbox
  IntRange batch_sizes{32, 256};
  IntRange unroll_lengths{4, 12};
  std::optional<GraphFamily> held_out_family;
  std::uint64_t pinned_workload_seed = 1234;
  std::uint64_t test_workload_seed = 4321;
  DeviceSet devices = default_device_set();
};

struct TaskInstance {
  CompGraph graph;
  DeviceSet devices;
  WorkloadMode mode = WorkloadMode::kFixedBlackbox;
  GraphFamily family = GraphFamily::kNmtLike;
  GraphParams params;
  // Seed of the generator stream; (family, params, workload_seed) rebuilds
  // the graph exactly.
  std::uint64_t workload_seed = 0;
  std::vector<std::string> sampled_knobs;

  std::string content_hash() const { return graph_hash(graph); }
};

TaskInstance make_instance(GraphFamily family, const GraphParams& params,
                           std::uint64_t workload_seed, DeviceSet devices,
                           WorkloadMode mode = WorkloadMode::kFixedBlackbox);

// Fixed modes ignore `workload_rng` and return the instance pinned by the
// spec's seeds; randomized modes draw batch size, unroll length and the
// generator seed from it.
TaskInstance sample_instance(WorkloadMode mode, const DistributionSpec& spec,
                             RngStream& workload_rng);

nlohmann::json provenance_json(const TaskInstance& instance);
// Rebuilds from provenance (family, params, workload_seed) and devices.
TaskInstance instance_from_provenance(const nlohmann::json& doc,
                                      const DeviceSet& devices);

}  // namespace rltask

#endif  // RLTASK_INSTANCE_HPP_
