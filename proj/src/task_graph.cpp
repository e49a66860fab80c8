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

#include "rltask/task_graph.hpp"

#include <algorithm>
#include <queue>
#include <set>

#include "rltask/error.hpp"

namespace rltask {

namespace {

constexpr std::string_view kKindNames[] = {"grouper", "placer", "random",
                                           "external"};

void check_children(const TaskGraphSpec& graph) {
  for (const auto& [name, node] : graph.nodes) {
    for (const auto& c : node.children) {
      if (!graph.nodes.contains(c)) {
        throw StructureError("node '" + name + "' references unknown child '" +
                             c + "'");
      }
    }
  }
  for (const auto& r : graph.roots) {
    if (!graph.nodes.contains(r)) {
      throw StructureError("unknown root '" + r + "'");
    }
  }
}

std::vector<std::string> find_cycle(const TaskGraphSpec& graph,
                                    const std::set<std::string>& remaining) {
  // Every remaining node has an in-edge from another remaining node, so
  // walking parents backwards must revisit a node.
  std::map<std::string, std::string> parent_of;
  for (const auto& [name, node] : graph.nodes) {
    if (!remaining.contains(name)) continue;
    for (const auto& c : node.children) {
      if (remaining.contains(c) && !parent_of.contains(c)) parent_of[c] = name;
    }
  }
  std::string cur = *remaining.begin();
  std::map<std::string, std::size_t> seen;
  std::vector<std::string> walk;
  while (!seen.contains(cur)) {
    seen[cur] = walk.size();
    walk.push_back(cur);
    cur = parent_of.at(cur);
  }
  std::vector<std::string> cycle(walk.begin() + seen[cur], walk.end());
  std::reverse(cycle.begin(), cycle.end());
  return cycle;
}

}  // namespace

std::string_view policy_kind_name(PolicyKind kind) {
  return kKindNames[static_cast<int>(kind)];
}

PolicyKind parse_policy_kind(std::string_view name) {
  for (int i = 0; i < 4; ++i) {
    if (kKindNames[i] == name) return static_cast<PolicyKind>(i);
  }
  throw ConfigError("unknown policy kind '" + std::string(name) + "'");
}

std::vector<std::string> TaskGraphSpec::parents(const std::string& name) const {
  std::vector<std::string> out;
  for (const auto& [n, node] : nodes) {
    if (std::find(node.children.begin(), node.children.end(), name) !=
        node.children.end()) {
      out.push_back(n);
    }
  }
  return out;
}

TaskGraphSpec add_subtask(TaskGraphSpec graph,
                          const std::optional<std::string>& parent,
                          TaskNode node) {
  if (node.name.empty()) throw StructureError("task node needs a name");
  if (parent && *parent == node.name) {
    throw StructureError("cycle: '" + node.name + "' cannot be its own child");
  }
  if (graph.nodes.contains(node.name)) {
    throw StructureError("duplicate task name '" + node.name + "'");
  }
  if (parent && !graph.nodes.contains(*parent)) {
    throw StructureError("unknown parent '" + *parent + "'");
  }
  const std::string name = node.name;
  graph.nodes.emplace(name, std::move(node));
  if (parent) {
    graph.nodes.at(*parent).children.push_back(name);
  } else {
    graph.roots.push_back(name);
  }
  const TopologyResult topo = validate_topology(graph);
  if (!topo.acyclic()) {
    std::string msg = "adding '" + name + "' creates a cycle:";
    for (const auto& c : topo.cycle) msg += " " + c;
    throw StructureError(msg);
  }
  return graph;
}

TopologyResult validate_topology(const TaskGraphSpec& graph) {
  check_children(graph);
  std::map<std::string, int> indegree;
  for (const auto& [name, node] : graph.nodes) indegree.emplace(name, 0);
  for (const auto& [name, node] : graph.nodes) {
    for (const auto& c : node.children) ++indegree[c];
  }
  std::priority_queue<std::string, std::vector<std::string>, std::greater<>>
      ready;
  for (const auto& [name, d] : indegree) {
    if (d == 0) ready.push(name);
  }
  TopologyResult result;
  while (!ready.empty()) {
    std::string cur = ready.top();
    ready.pop();
    result.order.push_back(cur);
    for (const auto& c : graph.nodes.at(cur).children) {
      if (--indegree[c] == 0) ready.push(c);
    }
  }
  if (result.order.size() != graph.nodes.size()) {
    std::set<std::string> remaining;
    for (const auto& [name, d] : indegree) {
      if (d > 0) remaining.insert(name);
    }
    result.cycle = find_cycle(graph, remaining);
    result.order.clear();
  }
  return result;
}

std::map<std::string, Value> execute(
    const TaskGraphSpec& graph, const std::map<std::string, Value>& inputs,
    std::map<std::string, RngStream>& streams) {
  const TopologyResult topo = validate_topology(graph);
  if (!topo.acyclic()) throw StructureError("task graph is cyclic");
  for (const auto& r : graph.roots) {
    if (!inputs.contains(r)) {
      throw StructureError("missing input for root '" + r + "'");
    }
  }

  std::map<std::string, Value> outputs;
  for (const auto& name : topo.order) {
    const TaskNode& node = graph.nodes.at(name);
    const std::vector<std::string> parents = graph.parents(name);
    Value input;
    if (parents.empty()) {
      auto it = inputs.find(name);
      if (it == inputs.end()) {
        throw StructureError("node '" + name + "' has no parent and no input");
      }
      input = it->second;
    } else if (parents.size() == 1) {
      input = outputs.at(parents.front());
    } else {
      std::vector<std::pair<std::string, Value>> joined;
      for (const auto& p : parents) joined.emplace_back(p, outputs.at(p));
      input = Value::composite(std::move(joined));
    }
    if (node.pre_transform) input = node.pre_transform(input);
    if (!node.policy) {
      throw StructureError("node '" + name + "' has no policy");
    }
    RngStream& rng = streams.try_emplace(name, RngStream(0)).first->second;
    Value out = node.policy(input, rng);
    if (node.post_transform) out = node.post_transform(out);
    outputs.emplace(name, std::move(out));
  }
  return outputs;
}

nlohmann::json to_json(const TaskGraphSpec& graph) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& [name, node] : graph.nodes) {
    nodes.push_back({{"name", name},
                     {"policy", std::string(policy_kind_name(node.kind))},
                     {"children", node.children}});
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [name, node] : graph.nodes) {
    for (const auto& c : node.children) edges.push_back({name, c});
  }
  return {{"nodes", nodes}, {"edges", edges}, {"roots", graph.roots}};
}

}  // namespace rltask
