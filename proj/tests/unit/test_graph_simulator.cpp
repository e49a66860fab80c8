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

#include <map>
#include <numeric>
#include <set>
#include <string>

#include "oracles.hpp"
#include "rltask/error.hpp"
#include "rltask/graph.hpp"
#include "rltask/instance.hpp"
#include "rltask/simulator.hpp"

using namespace rltask;

namespace {

std::map<std::string, int> kind_counts(const CompGraph& g) {
  std::map<std::string, int> m;
  for (const Op& op : g.ops) ++m[op.kind];
  return m;
}

}  // namespace

TEST_CASE("nmt op and edge counts by traversal") {
  for (int L : {1, 2, 3}) {
    for (int U : {2, 5, 9}) {
      GraphParams p;
      p.layers = L;
      p.unroll_length = U;
      p.batch_size = 32;
      RngStream rng(L * 100 + U);
      const CompGraph g = generate_graph(GraphFamily::kNmtLike, p, rng);
      const auto k = kind_counts(g);
      CHECK(k.at("embedding") == 2);
      CHECK(k.at("encoder_cell") == L * U);
      CHECK(k.at("decoder_cell") == L * U);
      CHECK(k.at("attention") == U);
      CHECK(k.at("loss") == 1);
      CHECK(g.num_ops() == expected_op_count(GraphFamily::kNmtLike, p));
      // encoder: input + recurrence; decoder: input + recurrence/bridge +
      // attention feedback; attention: decoder top + all encoder tops;
      // loss: all attention steps
      const std::size_t edges = L * U + L * (U - 1) + 2 * L * U + (U - 1) +
                                U + U * U + U;
      CHECK(g.edges.size() == edges);
      g.validate();
    }
  }
}

TEST_CASE("mlp chain of depth 3") {
  GraphParams p;
  p.layers = 3;
  RngStream rng(1);
  const CompGraph g = generate_graph(GraphFamily::kMlpChain, p, rng);
  CHECK(g.num_ops() == 3);
  REQUIRE(g.edges.size() == 2);
  CHECK(g.edges[0] == Edge{0, 1});
  CHECK(g.edges[1] == Edge{1, 2});
}

TEST_CASE("generation is deterministic and scales with batch") {
  GraphParams p;
  p.unroll_length = 4;
  RngStream a(5), b(5);
  const CompGraph g1 = generate_graph(GraphFamily::kNmtLike, p, a);
  const CompGraph g2 = generate_graph(GraphFamily::kNmtLike, p, b);
  CHECK(g1 == g2);
  CHECK(graph_hash(g1) == graph_hash(g2));
  CHECK(graph_from_json(to_json(g1)) == g1);

  GraphParams p2 = p;
  p2.batch_size = 2 * p.batch_size;
  RngStream c(5);
  const CompGraph g3 = generate_graph(GraphFamily::kNmtLike, p2, c);
  for (std::size_t i = 0; i < g1.num_ops(); ++i) {
    if (g1.ops[i].kind == "encoder_cell") {
      CHECK(g3.ops[i].output_bytes == 2 * g1.ops[i].output_bytes);
      // same jitter draws, so the cost doubles up to quantization
      CHECK(g3.ops[i].compute_cost ==
            doctest::Approx(2 * g1.ops[i].compute_cost).epsilon(1e-6));
    }
  }
}

TEST_CASE("params outside documented ranges are rejected") {
  GraphParams p;
  p.unroll_length = 1;
  RngStream rng(1);
  CHECK_THROWS_AS(generate_graph(GraphFamily::kNmtLike, p, rng), ConfigError);
  p.unroll_length = 4;
  p.batch_size = 1024;
  CHECK_THROWS_AS(generate_graph(GraphFamily::kNmtLike, p, rng), ConfigError);
  CHECK_THROWS_AS(parse_family("resnet"), ConfigError);
}

TEST_CASE("single device run time equals the serial sum exactly") {
  GraphParams p;
  p.unroll_length = 7;
  RngStream rng(3);
  const CompGraph g = generate_graph(GraphFamily::kNmtLike, p, rng);
  const DeviceSet devs = default_device_set(2);
  for (int d = 0; d < 3; ++d) {
    double serial = 0.0;
    for (const Op& op : g.ops) serial += op.compute_cost / devs.devices[d].speed;
    const SimMetrics m = simulate_runtime(g, single_device_placement(g, d), devs);
    if (m.valid) CHECK(m.run_time == serial);
    CHECK(m.makespan == serial);
  }
}

TEST_CASE("chain across three devices serializes") {
  CompGraph g;
  for (int i = 0; i < 3; ++i) {
    Op op;
    op.id = i;
    op.kind = "dense";
    op.compute_cost = 0.5 * (i + 1);
    g.ops.push_back(op);
  }
  g.edges = {{0, 1}, {1, 2}};
  const DeviceSet devs = uniform_device_set(
      {{"a", 1.0, 100}, {"b", 1.0, 100}, {"c", 1.0, 100}}, 1.0);
  const SimMetrics m = simulate_runtime(g, Placement{{0, 1, 2}}, devs);
  CHECK(m.run_time == 3.0);
  CHECK(m.busy_time == std::vector<double>{0.5, 1.0, 1.5});
}

TEST_CASE("memory overflow gives the penalty") {
  CompGraph g;
  Op op;
  op.kind = "dense";
  op.compute_cost = 1.0;
  op.memory_bytes = 60;
  g.ops = {op, op};
  g.ops[1].id = 1;
  const DeviceSet devs =
      uniform_device_set({{"a", 1.0, 100}, {"b", 1.0, 100}}, 1.0);
  const SimMetrics bad = simulate_runtime(g, Placement{{0, 0}}, devs);
  CHECK_FALSE(bad.valid);
  CHECK(bad.run_time == kDefaultInvalidPenalty);
  CHECK(bad.peak_memory[0] == 120);
  const SimMetrics ok = simulate_runtime(g, Placement{{0, 1}}, devs);
  CHECK(ok.valid);
  CHECK(ok.run_time == 1.0);
  CHECK_THROWS_AS(simulate_runtime(g, Placement{{0}}, devs), SimulationError);
  CHECK_THROWS_AS(simulate_runtime(g, Placement{{0, 2}}, devs),
                  SimulationError);
}

TEST_CASE("simulator matches the naive event oracle on random DAGs") {
  RngStream rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const CompGraph g = oracle::random_dag(rng, 10, rng.uniform(0.1, 0.6));
    const DeviceSet devs = oracle::random_devices(rng, 3, 3000);
    std::vector<int> where(g.num_ops());
    for (int& d : where) d = static_cast<int>(rng.uniform_int(devs.size()));
    const SimMetrics m = simulate_runtime(g, Placement{where}, devs);
    const oracle::SimOutcome o = oracle::naive_simulate(g, where, devs);
    CHECK(m.valid == o.valid);
    CHECK(m.run_time == o.run_time);
    if (m.valid) {
      CHECK(m.run_time >= oracle::longest_path(g, devs.max_speed()));
      CHECK(critical_path_lower_bound(g, devs) ==
            oracle::longest_path(g, devs.max_speed()));
      const double busiest =
          *std::max_element(m.busy_time.begin(), m.busy_time.end());
      CHECK(m.run_time >= busiest);
    }
  }
}

TEST_CASE("simulation is deterministic and noise is opt-in") {
  GraphParams p;
  p.unroll_length = 4;
  RngStream rng(8);
  const CompGraph g = generate_graph(GraphFamily::kNmtLike, p, rng);
  const DeviceSet devs = default_device_set(2);
  std::vector<int> where(g.num_ops());
  for (std::size_t i = 0; i < where.size(); ++i) where[i] = i % 3;
  const SimMetrics a = simulate_runtime(g, Placement{where}, devs);
  const SimMetrics b = simulate_runtime(g, Placement{where}, devs);
  CHECK(a.run_time == b.run_time);
  RngStream noise(1);
  SimOptions opt;
  opt.noise_sigma = 0.1;
  opt.noise = &noise;
  const SimMetrics c = simulate_runtime(g, Placement{where}, devs, opt);
  CHECK(c.makespan == a.makespan);
  CHECK(c.run_time != a.run_time);
}

TEST_CASE("device set json round trip") {
  const DeviceSet d = default_device_set(3);
  CHECK(devices_from_json(to_json(d)) == d);
}

TEST_CASE("fixed modes repeat one instance") {
  DistributionSpec spec;
  spec.devices = default_device_set(2);
  RngStream rng(4);
  const TaskInstance first =
      sample_instance(WorkloadMode::kFixedBlackbox, spec, rng);
  for (int i = 0; i < 4; ++i) {
    const TaskInstance again =
        sample_instance(WorkloadMode::kFixedBlackbox, spec, rng);
    CHECK(again.content_hash() == first.content_hash());
  }
}

TEST_CASE("randomized blackbox varies batch and unroll in one family") {
  DistributionSpec spec;
  spec.devices = default_device_set(2);
  spec.batch_sizes = {32, 256};
  RngStream rng(4);
  std::set<std::string> hashes;
  std::set<std::pair<int, int>> knobs;
  for (int i = 0; i < 6; ++i) {
    const TaskInstance t =
        sample_instance(WorkloadMode::kRandomizedBlackbox, spec, rng);
    CHECK(t.family == spec.family);
    CHECK(t.params.batch_size >= 32);
    CHECK(t.params.batch_size <= 256);
    hashes.insert(t.content_hash());
    knobs.insert({t.params.batch_size, t.params.unroll_length});
  }
  CHECK(hashes.size() == 6);
  CHECK(knobs.size() > 1);
}

TEST_CASE("out of distribution uses the held-out family") {
  DistributionSpec spec;
  spec.devices = default_device_set(2);
  RngStream rng(4);
  CHECK_THROWS_AS(
      sample_instance(WorkloadMode::kFixedOutOfDistribution, spec, rng),
      ProtocolError);
  spec.held_out_family = GraphFamily::kCnnLike;
  const TaskInstance t =
      sample_instance(WorkloadMode::kFixedOutOfDistribution, spec, rng);
  CHECK(t.family == GraphFamily::kCnnLike);
  CHECK(t.family != spec.family);
}

TEST_CASE("provenance rebuilds the instance bit for bit") {
  DistributionSpec spec;
  spec.devices = default_device_set(2);
  RngStream rng(19);
  const TaskInstance t =
      sample_instance(WorkloadMode::kRandomizedInDistribution, spec, rng);
  const TaskInstance back =
      instance_from_provenance(provenance_json(t), spec.devices);
  CHECK(back.graph == t.graph);
  CHECK(back.content_hash() == t.content_hash());
}
