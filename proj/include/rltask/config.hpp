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

// Experiment configuration: a versioned JSON document covering the schema
// variant, converter options, task graph, both agent configs, the workload
// distribution, protocol class and budget.

#ifndef RLTASK_CONFIG_HPP_
#define RLTASK_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "rltask/classification.hpp"
#include "rltask/converter.hpp"
#include "rltask/env.hpp"
#include "rltask/instance.hpp"
#include "rltask/nn.hpp"
#include "rltask/spaces.hpp"

namespace rltask {

inline constexpr const char* kSpecVersion = "1.0";

struct TaskGraphConfig {
  struct Node {
    std::string name;
    std::string policy;
    std::vector<std::string> children;
    bool operator==(const Node&) const = default;
  };
  std::vector<Node> nodes;

  // grouper -> placer
  static TaskGraphConfig hierarchical();
  bool operator==(const TaskGraphConfig&) const = default;
};

struct ExperimentConfig {
  std::string spec_version = kSpecVersion;
  std::string experiment_id = "experiment";
  SchemaVariant schema_variant = SchemaVariant::kGraph;
  std::vector<std::string> schema_devices;  // empty: take env device names
  ConverterOptions converter;
  RewardMode reward_mode = RewardMode::kIncremental;
  TaskGraphConfig task_graph = TaskGraphConfig::hierarchical();
  AgentConfig grouper = AgentConfig::grouper_defaults();
  AgentConfig placer = AgentConfig::placer_defaults();
  DistributionSpec distribution;
  int protocol_class = 0;
  std::size_t trials = 1;
  std::size_t budget = 1000;
  std::uint64_t master_seed = 1234;
  std::uint64_t pinned_optimization_seed = 1234;
  int final_window = 10;
  int patience = 0;
  double noise_sigma = 0.0;
  double threshold = kDefaultThreshold;
  bool classify_best = false;
  std::string output_dir = "runs";
};

nlohmann::json to_json(const ExperimentConfig& config);
// Unknown keys are rejected; missing keys take defaults.
ExperimentConfig config_from_json(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

// Raises ConfigError on any inconsistency, before anything runs.
void validate(const ExperimentConfig& config);

// SHA-256 of the canonical JSON without output_dir, so relocating a run
// does not change its identity.
std::string config_hash(const ExperimentConfig& config);

}  // namespace rltask

#endif  // RLTASK_CONFIG_HPP_
