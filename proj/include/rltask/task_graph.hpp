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

// Task graphs: directed acyclic hierarchies of learners. Outputs of a parent
// are routed to its children through per-node pre/post transforms; execution
// returns every node's output.

#ifndef RLTASK_TASK_GRAPH_HPP_
#define RLTASK_TASK_GRAPH_HPP_

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rltask/rng.hpp"
#include "rltask/spaces.hpp"

namespace rltask {

enum class PolicyKind { kGrouper, kPlacer, kRandom, kExternal };

std::string_view policy_kind_name(PolicyKind kind);
PolicyKind parse_policy_kind(std::string_view name);

using Transform = std::function<Value(const Value&)>;
using PolicyFn = std::function<Value(const Value&, RngStream&)>;

struct TaskNode {
  std::string name;
  PolicyKind kind = PolicyKind::kExternal;
  PolicyFn policy;
  Transform pre_transform;   // identity when empty
  Transform post_transform;  // identity when empty
  std::vector<std::string> children;
};

struct TaskGraphSpec {
  std::map<std::string, TaskNode> nodes;
  std::vector<std::string> roots;

  // Parent names of `name`, sorted.
  std::vector<std::string> parents(const std::string& name) const;
};

// Adds `node` as a root (parent empty) or as a child of `parent`. Throws
// StructureError on duplicate names, unknown parents, and cycles; the input
// graph is left untouched.
TaskGraphSpec add_subtask(TaskGraphSpec graph,
                          const std::optional<std::string>& parent,
                          TaskNode node);

struct TopologyResult {
  std::vector<std::string> order;  // empty when cyclic
  std::vector<std::string> cycle;  // nodes on one cycle, in edge order

  bool acyclic() const { return cycle.empty(); }
};

// Kahn's algorithm, ties broken by name. Dangling child references throw.
TopologyResult validate_topology(const TaskGraphSpec& graph);

// Evaluates nodes in topological order. Roots consume `inputs`; other nodes
// receive their parent's output, or with several parents a composite keyed
// by parent name. Nodes without an entry in `streams` get a stream seeded
// with 0.
std::map<std::string, Value> execute(
    const TaskGraphSpec& graph, const std::map<std::string, Value>& inputs,
    std::map<std::string, RngStream>& streams);

nlohmann::json to_json(const TaskGraphSpec& graph);

}  // namespace rltask

#endif  // RLTASK_TASK_GRAPH_HPP_
