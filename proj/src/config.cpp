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

#include "rltask/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "rltask/error.hpp"
#include "rltask/hash.hpp"
#include "rltask/task_graph.hpp"

namespace rltask {

namespace {

using nlohmann::json;

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.contains(key)) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

json range_json(const IntRange& r) { return json::array({r.lo, r.hi}); }

IntRange range_from(const json& j) {
  return {j.at(0).get<int>(), j.at(1).get<int>()};
}

}  // namespace

TaskGraphConfig TaskGraphConfig::hierarchical() {
  return {{{"grouper", "grouper", {"placer"}}, {"placer", "placer", {}}}};
}

json to_json(const ExperimentConfig& c) {
  json nodes = json::array();
  for (const auto& n : c.task_graph.nodes) {
    nodes.push_back(
        {{"name", n.name}, {"policy", n.policy}, {"children", n.children}});
  }
  const DistributionSpec& d = c.distribution;
  return {
      {"spec_version", c.spec_version},
      {"experiment_id", c.experiment_id},
      {"schema",
       {{"variant", std::string(variant_name(c.schema_variant))},
        {"devices", c.schema_devices}}},
      {"converter",
       {{"invalid_penalty", c.converter.invalid_penalty},
        {"reward_scale", c.converter.reward_transform.scale},
        {"reward_shift", c.converter.reward_transform.shift},
        {"reward_mode", std::string(reward_mode_name(c.reward_mode))}}},
      {"task_graph", {{"nodes", nodes}}},
      {"agents", {{"grouper", to_json(c.grouper)}, {"placer", to_json(c.placer)}}},
      {"environment",
       {{"family", std::string(family_name(d.family))},
        {"params", to_json(d.base)},
        {"batch_sizes", range_json(d.batch_sizes)},
        {"unroll_lengths", range_json(d.unroll_lengths)},
        {"held_out_family",
         d.held_out_family ? json(std::string(family_name(*d.held_out_family)))
                           : json(nullptr)},
        {"pinned_workload_seed", d.pinned_workload_seed},
        {"test_workload_seed", d.test_workload_seed},
        {"devices", to_json(d.devices)},
        {"noise_sigma", c.noise_sigma}}},
      {"protocol",
       {{"class", c.protocol_class},
        {"trials", c.trials},
        {"budget", c.budget},
        {"master_seed", c.master_seed},
        {"pinned_optimization_seed", c.pinned_optimization_seed},
        {"final_window", c.final_window},
        {"patience", c.patience},
        {"threshold", c.threshold},
        {"classify_best", c.classify_best}}},
      {"output_dir", c.output_dir}};
}

ExperimentConfig config_from_json(const json& doc) {
  ExperimentConfig c;
  try {
    check_keys(doc,
               {"spec_version", "experiment_id", "schema", "converter",
                "task_graph", "agents", "environment", "protocol",
                "output_dir"},
               "config");
    if (!doc.contains("spec_version")) {
      throw ConfigError("config lacks spec_version");
    }
    c.spec_version = doc.at("spec_version").get<std::string>();
    c.experiment_id = doc.value("experiment_id", c.experiment_id);
    c.output_dir = doc.value("output_dir", c.output_dir);
    if (doc.contains("schema")) {
      const json& s = doc.at("schema");
      check_keys(s, {"variant", "devices"}, "schema");
      if (s.contains("variant")) {
        c.schema_variant = parse_variant(s.at("variant").get<std::string>());
      }
      c.schema_devices = s.value("devices", c.schema_devices);
    }
    if (doc.contains("converter")) {
      const json& s = doc.at("converter");
      check_keys(s,
                 {"invalid_penalty", "reward_scale", "reward_shift",
                  "reward_mode"},
                 "converter");
      c.converter.invalid_penalty =
          s.value("invalid_penalty", c.converter.invalid_penalty);
      c.converter.reward_transform.scale = s.value("reward_scale", 1.0);
      c.converter.reward_transform.shift = s.value("reward_shift", 0.0);
      if (s.contains("reward_mode")) {
        c.reward_mode =
            parse_reward_mode(s.at("reward_mode").get<std::string>());
      }
    }
    if (doc.contains("task_graph")) {
      const json& s = doc.at("task_graph");
      check_keys(s, {"nodes"}, "task_graph");
      c.task_graph.nodes.clear();
      for (const auto& n : s.at("nodes")) {
        c.task_graph.nodes.push_back(
            {n.at("name").get<std::string>(), n.at("policy").get<std::string>(),
             n.value("children", std::vector<std::string>{})});
      }
    }
    if (doc.contains("agents")) {
      const json& s = doc.at("agents");
      check_keys(s, {"grouper", "placer"}, "agents");
      if (s.contains("grouper")) {
        c.grouper = agent_config_from_json(s.at("grouper"), c.grouper);
      }
      if (s.contains("placer")) {
        c.placer = agent_config_from_json(s.at("placer"), c.placer);
      }
    }
    if (doc.contains("environment")) {
      const json& s = doc.at("environment");
      check_keys(s,
                 {"family", "params", "batch_sizes", "unroll_lengths",
                  "held_out_family", "pinned_workload_seed",
                  "test_workload_seed", "devices", "num_gpus", "noise_sigma"},
                 "environment");
      DistributionSpec& d = c.distribution;
      if (s.contains("family")) {
        d.family = parse_family(s.at("family").get<std::string>());
      }
      if (s.contains("params")) d.base = params_from_json(s.at("params"));
      if (s.contains("batch_sizes")) d.batch_sizes = range_from(s.at("batch_sizes"));
      if (s.contains("unroll_lengths")) {
        d.unroll_lengths = range_from(s.at("unroll_lengths"));
      }
      if (s.contains("held_out_family") && !s.at("held_out_family").is_null()) {
        d.held_out_family =
            parse_family(s.at("held_out_family").get<std::string>());
      }
      d.pinned_workload_seed =
          s.value("pinned_workload_seed", d.pinned_workload_seed);
      d.test_workload_seed = s.value("test_workload_seed", d.test_workload_seed);
      if (s.contains("devices") && s.contains("num_gpus")) {
        throw ConfigError("give either environment.devices or num_gpus");
      }
      if (s.contains("devices")) {
        d.devices = devices_from_json(s.at("devices"));
      } else if (s.contains("num_gpus")) {
        d.devices = default_device_set(s.at("num_gpus").get<int>());
      }
      c.noise_sigma = s.value("noise_sigma", c.noise_sigma);
    }
    if (doc.contains("protocol")) {
      const json& s = doc.at("protocol");
      check_keys(s,
                 {"class", "trials", "budget", "master_seed",
                  "pinned_optimization_seed", "final_window", "patience",
                  "threshold", "classify_best"},
                 "protocol");
      c.protocol_class = s.value("class", c.protocol_class);
      c.trials = s.value("trials", c.trials);
      c.budget = s.value("budget", c.budget);
      c.master_seed = s.value("master_seed", c.master_seed);
      c.pinned_optimization_seed =
          s.value("pinned_optimization_seed", c.pinned_optimization_seed);
      c.final_window = s.value("final_window", c.final_window);
      c.patience = s.value("patience", c.patience);
      c.threshold = s.value("threshold", c.threshold);
      c.classify_best = s.value("classify_best", c.classify_best);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  } catch (const Error& e) {
    if (dynamic_cast<const ConfigError*>(&e)) throw;
    throw ConfigError(e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(doc);
}

void validate(const ExperimentConfig& c) {
  if (c.spec_version != kSpecVersion) {
    throw ConfigError("unsupported spec_version '" + c.spec_version +
                      "' (expected " + kSpecVersion + ")");
  }
  if (c.experiment_id.empty() ||
      c.experiment_id.find_first_of("/\\") != std::string::npos) {
    throw ConfigError("experiment_id must be a non-empty path component");
  }
  const DistributionSpec& d = c.distribution;
  try {
    d.devices.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("environment devices: ") + e.what());
  }
  if (d.devices.size() < 2) {
    throw ConfigError("placement needs at least two devices");
  }
  const std::vector<std::string> env_devices = d.devices.names();
  if (!c.schema_devices.empty() && c.schema_devices != env_devices) {
    std::string a, b;
    for (const auto& s : c.schema_devices) a += (a.empty() ? "" : ",") + s;
    for (const auto& s : env_devices) b += (b.empty() ? "" : ",") + s;
    throw ConfigError("schema devices [" + a +
                      "] differ from environment devices [" + b + "]");
  }

  // Task graph: must be acyclic and be the grouper -> placer pipeline.
  TaskGraphSpec spec;
  for (const auto& n : c.task_graph.nodes) {
    TaskNode node;
    node.name = n.name;
    try {
      node.kind = parse_policy_kind(n.policy);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
    node.children = n.children;
    if (spec.nodes.contains(n.name)) {
      throw ConfigError("duplicate task node '" + n.name + "'");
    }
    spec.nodes.emplace(n.name, std::move(node));
  }
  TopologyResult topo;
  try {
    topo = validate_topology(spec);
  } catch (const Error& e) {
    throw ConfigError(std::string("task graph: ") + e.what());
  }
  if (!topo.acyclic()) throw ConfigError("task graph is cyclic");
  if (c.task_graph != TaskGraphConfig::hierarchical()) {
    throw ConfigError(
        "task graph must be the grouper -> placer pipeline "
        "(nodes 'grouper' with child 'placer')");
  }

  try {
    c.grouper.validate();
    c.placer.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (c.grouper.num_groups != c.placer.num_groups) {
    throw ConfigError("grouper and placer disagree on num_groups");
  }

  if (c.protocol_class < 0 || c.protocol_class > 6) {
    throw ConfigError("protocol class must be 0..6");
  }
  if (c.trials < 1) throw ConfigError("trials must be >= 1");
  if (c.budget < 1) throw ConfigError("budget must be >= 1 graph evaluation");
  if (c.final_window < 1) throw ConfigError("final_window must be >= 1");
  if (c.patience < 0) throw ConfigError("patience must be >= 0");
  if (!(c.threshold > 0.0 && c.threshold < 1.0)) {
    throw ConfigError("threshold must be in (0, 1)");
  }
  if (!(c.noise_sigma >= 0.0)) throw ConfigError("noise_sigma must be >= 0");
  if (!(c.converter.invalid_penalty > 0.0)) {
    throw ConfigError("invalid_penalty must be > 0");
  }

  try {
    validate_params(d.base);
    GraphParams lo = d.base, hi = d.base;
    lo.batch_size = d.batch_sizes.lo;
    hi.batch_size = d.batch_sizes.hi;
    lo.unroll_length = d.unroll_lengths.lo;
    hi.unroll_length = d.unroll_lengths.hi;
    validate_params(lo);
    validate_params(hi);
  } catch (const Error& e) {
    throw ConfigError(std::string("environment: ") + e.what());
  }
  if (d.batch_sizes.lo > d.batch_sizes.hi ||
      d.unroll_lengths.lo > d.unroll_lengths.hi) {
    throw ConfigError("distribution ranges need lo <= hi");
  }
  if (c.protocol_class >= 5) {
    if (!d.held_out_family) {
      throw ConfigError("out-of-distribution classes need held_out_family");
    }
    if (*d.held_out_family == d.family) {
      throw ConfigError("held_out_family must differ from family");
    }
  }
}

std::string config_hash(const ExperimentConfig& config) {
  json doc = to_json(config);
  doc.erase("output_dir");
  return content_hash(doc);
}

}  // namespace rltask
