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
#include <map>
#include <vector>

#include "rltask/error.hpp"
#include "rltask/graph.hpp"
#include "rltask/grouper.hpp"
#include "rltask/hierarchical.hpp"
#include "rltask/nn.hpp"
#include "rltask/placer.hpp"
#include "rltask/random_search.hpp"
#include "rltask/simulator.hpp"
#include "oracles.hpp"

using namespace rltask;

namespace {

CompGraph small_nmt(int unroll, std::uint64_t seed) {
  GraphParams p;
  p.unroll_length = unroll;
  RngStream rng(seed);
  return generate_graph(GraphFamily::kNmtLike, p, rng);
}

AgentConfig fast_grouper() {
  AgentConfig c = AgentConfig::grouper_defaults();
  c.num_groups = 6;
  c.update_iterations = 2;
  return c;
}

AgentConfig fast_placer() {
  AgentConfig c = AgentConfig::placer_defaults();
  c.num_groups = 6;
  c.aggregation_rounds = 2;
  c.layer_size = 8;
  c.groups_per_evaluation = 3;
  return c;
}

}  // namespace

TEST_CASE("default agent configs") {
  const AgentConfig g = AgentConfig::grouper_defaults();
  CHECK(g.clip_ratio == 0.25);
  CHECK(g.discount == 1.0);
  CHECK(g.gae_lambda == 1.0);
  CHECK(g.num_groups == 20);
  CHECK(g.layer_size == 32);
  CHECK(g.hidden_layers == 2);
  CHECK(g.activation == Activation::kTanh);
  CHECK(g.update_iterations == 10);
  const AgentConfig p = AgentConfig::placer_defaults();
  CHECK(p.clip_ratio == 0.2);
  CHECK(p.batch_size == 10);
  CHECK(p.aggregation_rounds == 10);
  CHECK(p.num_in_neighbors == 5);
  CHECK(p.num_out_neighbors == 5);
  CHECK(p.groups_per_evaluation == 10);
  g.validate();
  p.validate();
}

TEST_CASE("agent config validation and json") {
  AgentConfig c = AgentConfig::placer_defaults();
  CHECK(agent_config_from_json(to_json(c), AgentConfig::grouper_defaults()) == c);
  c.clip_ratio = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = AgentConfig::placer_defaults();
  c.discount = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = AgentConfig::placer_defaults();
  c.gae_lambda = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = AgentConfig::placer_defaults();
  c.lr_end = c.lr_start * 2;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  const nlohmann::json partial = {{"clip_ratio", 0.1}};
  const AgentConfig merged =
      agent_config_from_json(partial, AgentConfig::grouper_defaults());
  CHECK(merged.clip_ratio == 0.1);
  CHECK(merged.num_groups == 20);
}

TEST_CASE("parameter init bounds and json") {
  const GrouperNet net(kOpFeatureWidth, 20, AgentConfig::grouper_defaults());
  RngStream rng(1);
  const PolicyParams p = init_params(net.layout(), rng);
  CHECK(p.values.size() == net.layout().total());
  for (const ParamSlice& s : net.layout().slices()) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(s.fan_in));
    for (std::size_t i = s.offset; i < s.offset + s.size(); ++i) {
      CHECK(std::abs(p.values[i]) <= bound);
    }
  }
  // 16 -> 32 -> 32, policy 32 -> 20, value 32 -> 1
  CHECK(net.layout().total() ==
        (16 * 32 + 32) + (32 * 32 + 32) + (32 * 20 + 20) + (32 + 1));
  const PolicyParams back = params_from_json(to_json(p), net.layout());
  CHECK(back.values == p.values);
  const GrouperNet other(kOpFeatureWidth, 10, AgentConfig::grouper_defaults());
  CHECK_THROWS_AS(params_from_json(to_json(p), other.layout()), ShapeError);
}

TEST_CASE("op features are bounded and per-op") {
  const CompGraph g = small_nmt(4, 1);
  const auto f = op_feature_matrix(g);
  CHECK(f.size() == g.num_ops() * kOpFeatureWidth);
  for (double x : f) {
    CHECK(std::isfinite(x));
    CHECK(std::abs(x) <= 1.0);
  }
  // kind one-hot
  for (std::size_t i = 0; i < g.num_ops(); ++i) {
    const int k = op_kind_index(g.ops[i].kind);
    CHECK(f[i * kOpFeatureWidth + k] == 1.0);
  }
}

TEST_CASE("grouped graph aggregates members and ranks neighbors") {
  // 0 -> 1, 0 -> 2, 1 -> 2, 2 -> 3; groups {0}, {1, 2}, {3}, {} (empty)
  CompGraph g;
  for (int i = 0; i < 4; ++i) {
    Op op;
    op.id = i;
    op.kind = "dense";
    op.compute_cost = 1.0 + i;
    op.output_bytes = 10;
    op.memory_bytes = 5;
    g.ops.push_back(op);
  }
  g.edges = {{0, 1}, {0, 2}, {1, 2}, {2, 3}};
  Grouping grouping;
  grouping.num_groups = 4;
  grouping.group_of_op = {0, 1, 1, 2};
  const GroupedGraph gg = build_grouped_graph(g, grouping, 5, 5);
  CHECK(gg.num_groups == 4);
  CHECK(gg.static_features.size() == 4 * kGroupStaticWidth);
  CHECK(gg.in_neighbors[1] == std::vector<int>{0});
  CHECK(gg.out_neighbors[1] == std::vector<int>{2});
  CHECK(gg.out_neighbors[0] == std::vector<int>{1});
  CHECK(gg.in_neighbors[3].empty());
  // cost fraction of group 1: (2 + 3) / 10
  CHECK(gg.static_features[1 * kGroupStaticWidth + kOpFeatureWidth] ==
        doctest::Approx(0.5));
  for (std::size_t j = 0; j < kGroupStaticWidth; ++j) {
    CHECK(gg.static_features[3 * kGroupStaticWidth + j] == 0.0);
  }
  const GroupedGraph capped = build_grouped_graph(g, grouping, 0, 0);
  CHECK(capped.in_neighbors[1].empty());
}

TEST_CASE("random search with budget one simulates once") {
  const CompGraph g = small_nmt(3, 2);
  const DeviceSet devs = default_device_set(2);
  RngStream rng(5);
  const SearchResult r = random_search_baseline(g, devs, 1, rng);
  CHECK(r.simulations == 1);
  CHECK(r.best_so_far.size() == 1);
  RngStream again(5);
  const SearchResult r2 = random_search_baseline(g, devs, 1, again);
  CHECK(r2.best == r.best);
  CHECK_THROWS_AS(random_search_baseline(g, devs, 0, rng), ConfigError);
}

TEST_CASE("exhaustive search finds the brute-force optimum") {
  RngStream rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    CompGraph g = oracle::random_dag(rng, 8, 0.35);
    const DeviceSet devs = oracle::random_devices(rng, 2, 2500);
    const std::size_t n = g.num_ops();
    const std::size_t nd = devs.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= nd;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t code = 0; code < total; ++code) {
      std::vector<int> where(n);
      std::size_t c = code;
      for (std::size_t i = 0; i < n; ++i) {
        where[i] = static_cast<int>(c % nd);
        c /= nd;
      }
      best = std::min(best, oracle::naive_simulate(g, where, devs).run_time);
    }
    RngStream unused(0);
    const SearchResult r =
        random_search_baseline(g, devs, total, unused, SearchMode::kExhaustive);
    CHECK(r.simulations == total);
    CHECK(r.best_run_time == best);
  }
}

TEST_CASE("best run time never increases with budget") {
  const CompGraph g = small_nmt(4, 3);
  const DeviceSet devs = default_device_set(2);
  RngStream rng(7);
  const SearchResult r = random_search_baseline(g, devs, 200, rng);
  for (std::size_t i = 1; i < r.best_so_far.size(); ++i) {
    CHECK(r.best_so_far[i] <= r.best_so_far[i - 1]);
  }
  CHECK(r.best_so_far.back() == r.best_run_time);
  CHECK(simulate_runtime(g, r.best, devs).run_time == r.best_run_time);
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t budget : {1u, 10u, 50u, 200u}) {
    RngStream same(7);
    const double b = random_search_baseline(g, devs, budget, same).best_run_time;
    CHECK(b <= prev);
    prev = b;
  }
}

TEST_CASE("hierarchical training respects its budget and is deterministic") {
  const CompGraph g = small_nmt(3, 4);
  const DeviceSet devs = default_device_set(2);
  auto run = [&] {
    RngStream wi(1), act(2), mb(3), nz(4);
    HierarchicalAgent agent(devs.size(), fast_grouper(), fast_placer(), wi);
    TrainOptions opt;
    opt.budget = 40;
    opt.final_window = 3;
    TrainResult r = agent.train(g, devs, opt, act, mb, nz);
    return std::make_pair(std::move(r), agent.checkpoint());
  };
  const auto [a, ca] = run();
  const auto [b, cb] = run();
  CHECK(a.evaluations <= 40);
  CHECK(a.steps.size() == a.evaluations);
  CHECK(a.transitions == a.evaluations);
  CHECK(a.episodes > 0);
  CHECK(a.grouper_updates > 0);
  CHECK(a.placer_updates > 0);
  CHECK(a.initial_run_time ==
        simulate_runtime(g, single_device_placement(g), devs).run_time);
  CHECK(a.best_run_time <= a.initial_run_time);
  CHECK(a.improvement_best >= a.improvement_final);
  CHECK(ca == cb);
  REQUIRE(a.steps.size() == b.steps.size());
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    CHECK(a.steps[i].run_time == b.steps[i].run_time);
  }
}

TEST_CASE("agent inference runs through the task graph") {
  const CompGraph g = small_nmt(3, 5);
  const DeviceSet devs = default_device_set(2);
  RngStream wi(9);
  const HierarchicalAgent agent(devs.size(), fast_grouper(), fast_placer(), wi);
  const TaskGraphSpec spec = agent.task_graph(g, SampleMode::kGreedy);
  CHECK(validate_topology(spec).order ==
        std::vector<std::string>{"grouper", "placer"});
  RngStream rng(1);
  const Placement p = agent.place(g, devs, SampleMode::kGreedy, rng);
  CHECK(p.assignment.size() == g.num_ops());
  const GreedyEvaluation e = agent.evaluate_greedy(g, devs);
  CHECK(e.placement == p);
  CHECK(e.run_time == simulate_runtime(g, p, devs).run_time);
  CHECK(e.improvement == relative_improvement(e.initial_run_time, e.run_time));
  // greedy inference ignores the stream
  RngStream other(1234);
  CHECK(agent.place(g, devs, SampleMode::kGreedy, other) == p);
  const DeviceSet four = default_device_set(3);
  CHECK_THROWS_AS(agent.evaluate_greedy(g, four), ShapeError);
}

TEST_CASE("checkpoint round trip preserves greedy behaviour") {
  const CompGraph g = small_nmt(3, 6);
  const DeviceSet devs = default_device_set(2);
  RngStream wi(1), act(2), mb(3), nz(4);
  HierarchicalAgent agent(devs.size(), fast_grouper(), fast_placer(), wi);
  TrainOptions opt;
  opt.budget = 20;
  agent.train(g, devs, opt, act, mb, nz);
  const nlohmann::json doc = agent.checkpoint();
  CHECK(doc.at("format") == "rltask-checkpoint");
  const HierarchicalAgent back = HierarchicalAgent::from_checkpoint(doc);
  CHECK(back.grouper_params().values == agent.grouper_params().values);
  CHECK(back.placer_params().values == agent.placer_params().values);
  CHECK(back.grouper_updates() == agent.grouper_updates());
  CHECK(back.evaluate_greedy(g, devs).placement ==
        agent.evaluate_greedy(g, devs).placement);
  nlohmann::json bad = doc;
  bad["format"] = "other";
  CHECK_THROWS_AS(HierarchicalAgent::from_checkpoint(bad), ShapeError);
}

TEST_CASE("terminal reward mode trains as well") {
  const CompGraph g = small_nmt(3, 7);
  const DeviceSet devs = default_device_set(2);
  RngStream wi(1), act(2), mb(3), nz(4);
  HierarchicalAgent agent(devs.size(), fast_grouper(), fast_placer(), wi);
  TrainOptions opt;
  opt.budget = 30;
  opt.reward_mode = RewardMode::kTerminal;
  const TrainResult r = agent.train(g, devs, opt, act, mb, nz);
  CHECK(r.evaluations <= 30);
  CHECK_FALSE(r.diverged);
  opt.budget = 0;
  CHECK_THROWS_AS(agent.train(g, devs, opt, act, mb, nz), ConfigError);
}
