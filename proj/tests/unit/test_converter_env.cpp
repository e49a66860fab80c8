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


#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "rltask/converter.hpp"
#include "rltask/env.hpp"
#include "rltask/error.hpp"
#include "rltask/graph.hpp"
#include "rltask/spaces.hpp"

using namespace rltask;

namespace {

CompGraph chain(int n) {
  CompGraph g;
  for (int i = 0; i < n; ++i) {
    Op op;
    op.id = i;
    op.kind = "dense";
    op.compute_cost = 1.0;
    g.ops.push_back(op);
    if (i > 0) g.edges.push_back({i - 1, i});
  }
  return g;
}

PlacementConverter make_converter(const CompGraph& g,
                                  std::vector<std::string> devices,
                                  SchemaVariant v = SchemaVariant::kGraph) {
  DeploymentParams p;
  p.devices = std::move(devices);
  p.input_graph = &g;
  return PlacementConverter(build_placement_schema(p, v));
}

CompGraph small_nmt(int unroll, std::uint64_t seed) {
  GraphParams p;
  p.unroll_length = unroll;
  RngStream rng(seed);
  return generate_graph(GraphFamily::kNmtLike, p, rng);
}

}  // namespace

TEST_CASE("two-op chain state with op 1 current") {
  const CompGraph g = chain(2);
  const PlacementConverter c = make_converter(g, {"cpu0", "gpu0"});
  SystemState s{&g, 1, {0, -1}};
  const Value v = c.system_to_agent_state(s);
  CHECK(v.child("embeddings")->as_tensor().data ==
        std::vector<double>{0, 1, 1, 0, 1, 0, 0, 0});
  CHECK(v.child("current_node_num")->as_integer() == 1);
  CHECK(v.child("in_neighbors")->as_tensor().data ==
        std::vector<double>{-1, -1, -1, -1, -1, 0, -1, -1, -1, -1});
  CHECK_FALSE(validate_value(c.schema().input_space, v).has_value());
}

TEST_CASE("single op is current and unplaced") {
  const CompGraph g = chain(1);
  const PlacementConverter c = make_converter(g, {"cpu0"});
  const Value v = c.system_to_agent_state(SystemState{&g, 0, {-1}});
  const auto& row = v.child("embeddings")->as_tensor().data;
  CHECK(row[0] == 1.0);
  CHECK(row[1] == 0.0);
}

TEST_CASE("converted states validate with exactly one current op") {
  const CompGraph g = small_nmt(4, 2);
  const PlacementConverter c =
      make_converter(g, {"cpu0", "gpu0", "gpu1"});
  RngStream rng(7);
  for (int cur = 0; cur < static_cast<int>(g.num_ops()); ++cur) {
    std::vector<int> placed(g.num_ops(), -1);
    for (int i = 0; i < cur; ++i) placed[i] = static_cast<int>(rng.uniform_int(std::uint64_t{3}));
    const Value v = c.system_to_agent_state(SystemState{&g, cur, placed});
    CHECK_FALSE(validate_value(c.schema().input_space, v).has_value());
    const auto& e = v.child("embeddings")->as_tensor().data;
    int current = 0;
    for (std::size_t i = 0; i < g.num_ops(); ++i) current += e[i * 5] == 1.0;
    CHECK(current == 1);
    CHECK(c.system_to_agent_state(SystemState{&g, cur, placed}) == v);
  }
  const Value rec = make_converter(g, {"cpu0", "gpu0", "gpu1"},
                                   SchemaVariant::kRecurrent)
                        .system_to_agent_state(SystemState{
                            &g, 0, std::vector<int>(g.num_ops(), 2)});
  CHECK(rec.as_tensor().shape == std::vector<std::size_t>{g.num_ops(), 3});
}

TEST_CASE("state conversion errors") {
  const CompGraph g = chain(2);
  const CompGraph other = chain(3);
  const PlacementConverter c = make_converter(g, {"cpu0", "gpu0"});
  CHECK_THROWS_AS(c.system_to_agent_state(SystemState{&other, 0, {-1, -1, -1}}),
                  ConversionError);
  CHECK_THROWS_AS(c.system_to_agent_state(SystemState{&g, 2, {-1, -1}}),
                  ConversionError);
}

TEST_CASE("action maps are mutual inverses") {
  const CompGraph g = chain(1);
  const PlacementConverter c = make_converter(g, {"cpu0", "gpu0"});
  CHECK(c.system_to_agent_action("gpu0") == 1);
  CHECK(c.agent_to_system_action(1) == "gpu0");
  CHECK_THROWS_AS(c.system_to_agent_action("tpu0"), ConversionError);

  const PlacementConverter one = make_converter(g, {"cpu0"});
  CHECK_THROWS_AS(one.agent_to_system_action(1), ConversionError);

  std::vector<std::string> names = {"a", "b", "c", "d", "e", "f", "g", "h"};
  RngStream rng(3);
  for (std::size_t i = names.size() - 1; i > 0; --i) {
    std::swap(names[i], names[rng.uniform_int(i + 1)]);
  }
  const PlacementConverter eight = make_converter(g, names);
  for (std::int64_t i = 0; i < 8; ++i) {
    CHECK(eight.system_to_agent_action(eight.agent_to_system_action(i)) == i);
    CHECK(eight.agent_to_system_action(eight.system_to_agent_action(names[i])) ==
          names[i]);
  }
}

TEST_CASE("reward is the negated run time") {
  const CompGraph g = chain(1);
  const PlacementConverter c = make_converter(g, {"cpu0"});
  CHECK(c.system_to_agent_reward(SystemMetrics{2.5, true, {}}) == -2.5);
  CHECK(c.system_to_agent_reward(SystemMetrics{0.0, true, {}}) == 0.0);
  CHECK(c.system_to_agent_reward(SystemMetrics{3.0, false, {}}) == -100.0);

  DeploymentParams p;
  p.devices = {"cpu0"};
  p.input_graph = &g;
  ConverterOptions opt;
  opt.reward_transform = {0.5, 1.0};
  const PlacementConverter t(build_placement_schema(p, SchemaVariant::kGraph),
                             opt);
  CHECK(t.system_to_agent_reward(SystemMetrics{2.0, true, {}}) == 0.0);
}

TEST_CASE("terminal rewards arrive only at the end") {
  // two equal ops, two identical devices, one group each: a 2-step episode
  CompGraph g;
  for (int i = 0; i < 2; ++i) {
    Op op;
    op.id = i;
    op.kind = "dense";
    op.compute_cost = 2.5;
    g.ops.push_back(op);
  }
  const DeviceSet devs =
      uniform_device_set({{"a", 1.0, 100}, {"b", 1.0, 100}}, 1.0);
  EnvOptions opt;
  opt.reward_mode = RewardMode::kTerminal;
  opt.groups_per_evaluation = 1;
  PlacementEnv env(g, devs, opt);
  env.reset();
  CHECK(env.initial_run_time() == 5.0);
  const int first[] = {0};
  const int second[] = {1};
  const StepResult a = env.step(first);
  const StepResult b = env.step(second);
  CHECK(a.reward == 0.0);
  CHECK_FALSE(a.done);
  CHECK(b.reward == -2.5);
  CHECK(b.done);
  CHECK_THROWS_AS(env.step(second), StructureError);
}

TEST_CASE("unchanged run time gives zero incremental reward") {
  const CompGraph g = chain(3);
  const DeviceSet devs =
      uniform_device_set({{"a", 1.0, 100}, {"b", 1.0, 100}}, 1.0);
  EnvOptions opt;
  opt.groups_per_evaluation = 1;
  PlacementEnv env(g, devs, opt);
  env.reset();
  const int stay[] = {0};
  CHECK(env.step(stay).reward == 0.0);
}

TEST_CASE("incremental rewards telescope over random rollouts") {
  const CompGraph g = small_nmt(5, 9);
  const DeviceSet devs = default_device_set(2);
  RngStream rng(31);
  for (int episode = 0; episode < 30; ++episode) {
    EnvOptions opt;
    opt.groups_per_evaluation = 1 + static_cast<int>(rng.uniform_int(std::uint64_t{6}));
    PlacementEnv env(g, devs, opt);
    Grouping grouping;
    grouping.num_groups = 8;
    for (std::size_t i = 0; i < g.num_ops(); ++i) {
      grouping.group_of_op.push_back(static_cast<int>(rng.uniform_int(std::uint64_t{8})));
    }
    env.reset(grouping);
    double total = 0.0;
    while (!env.done()) {
      std::vector<int> d(env.decisions_for_next_step());
      for (int& x : d) x = static_cast<int>(rng.uniform_int(devs.size()));
      total += env.step(d).reward;
    }
    CHECK(std::abs(total - (env.initial_run_time() - env.last_run_time())) <=
          1e-9);
    // every op ends up on its group's device
    for (std::size_t i = 0; i < g.num_ops(); ++i) {
      CHECK(env.placement().assignment[i] ==
            env.group_device()[grouping.group_of_op[i]]);
    }
  }
}

TEST_CASE("placement order skips empty groups") {
  Grouping g;
  g.num_groups = 4;
  g.group_of_op = {3, 1, 3, 1, 0};
  CHECK(g.placement_order() == std::vector<int>{3, 1, 0});
  CHECK(g.members()[2].empty());
  CHECK(Grouping::identity(3).placement_order() == std::vector<int>{0, 1, 2});
}
