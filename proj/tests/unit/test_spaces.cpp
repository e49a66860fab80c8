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

#include <vector>

#include "rltask/error.hpp"
#include "rltask/graph.hpp"
#include "rltask/rng.hpp"
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

// Width of one space computed from its description alone.
std::size_t width_oracle(const Space& s) {
  if (const auto* i = std::get_if<IntegerSpace>(&s.layout)) {
    return static_cast<std::size_t>(i->high - i->low);
  }
  if (const auto* t = std::get_if<TensorSpace>(&s.layout)) {
    std::size_t n = 1;
    for (auto d : t->shape) n *= d;
    return n;
  }
  std::size_t n = 0;
  for (const auto& [name, c] : std::get<CompositeSpace>(s.layout).children) {
    n += width_oracle(c);
  }
  return n;
}

}  // namespace

TEST_CASE("graph schema for 3 ops and 2 devices") {
  const CompGraph g = chain(3);
  DeploymentParams p;
  p.devices = {"cpu0", "gpu0"};
  p.input_graph = &g;
  const SchemaLayout s = build_placement_schema(p, SchemaVariant::kGraph);
  CHECK(s.output_space == Space::integer(0, 2));
  const Space* emb = s.input_space.child("embeddings");
  REQUIRE(emb != nullptr);
  CHECK(std::get<TensorSpace>(emb->layout).shape ==
        std::vector<std::size_t>{3, 4});
  CHECK(*s.input_space.child("current_node_num") == Space::integer(0, 3));
  CHECK(std::get<TensorSpace>(s.input_space.child("in_neighbors")->layout)
            .shape == std::vector<std::size_t>{3, 5});
  CHECK(std::get<TensorSpace>(s.input_space.child("out_neighbors")->layout)
            .shape == std::vector<std::size_t>{3, 5});
  // 3*4 + 3 + 3*5 + 3*5
  CHECK(s.input_space.flat_size() == 45);
  CHECK(width_oracle(s.input_space) == 45);
}

TEST_CASE("recurrent schema for one op and one device") {
  const CompGraph g = chain(1);
  DeploymentParams p;
  p.devices = {"cpu0"};
  p.input_graph = &g;
  const SchemaLayout s = build_placement_schema(p, SchemaVariant::kRecurrent);
  CHECK(s.input_space == Space::tensor({1, 1}));
  CHECK(s.output_space == Space::integer(0, 1));
}

TEST_CASE("schema shapes follow the generated nmt graph") {
  GraphParams gp;
  gp.layers = 2;
  gp.unroll_length = 4;
  RngStream rng(3);
  const CompGraph g = generate_graph(GraphFamily::kNmtLike, gp, rng);
  std::size_t counted = 0;
  for (const Op& op : g.ops) counted += op.kind.empty() ? 0 : 1;
  DeploymentParams p;
  p.devices = {"cpu0", "gpu0", "gpu1", "gpu2"};
  p.input_graph = &g;
  const SchemaLayout s = build_placement_schema(p, SchemaVariant::kGraph);
  CHECK(std::get<TensorSpace>(s.input_space.child("embeddings")->layout)
            .shape == std::vector<std::size_t>{counted, 6});
  CHECK(s.num_ops == counted);
}

TEST_CASE("schema errors") {
  const CompGraph empty;
  const CompGraph one = chain(1);
  DeploymentParams p;
  p.devices = {"cpu0"};
  p.input_graph = &empty;
  CHECK_THROWS_AS(build_placement_schema(p, SchemaVariant::kGraph),
                  LayoutError);
  p.input_graph = &one;
  p.devices.clear();
  CHECK_THROWS_AS(build_placement_schema(p, SchemaVariant::kGraph),
                  LayoutError);
  p.devices = {"cpu0"};
  p.max_neighbors = 0;
  CHECK_THROWS_AS(build_placement_schema(p, SchemaVariant::kGraph),
                  LayoutError);
}

TEST_CASE("validate_value boundaries") {
  const Space i4 = Space::integer(0, 4);
  CHECK_FALSE(validate_value(i4, Value::integer(3)).has_value());
  const auto bad = validate_value(i4, Value::integer(4));
  REQUIRE(bad.has_value());

  const Space comp = Space::composite(
      {{"embeddings", Space::tensor({1, 2})}, {"current", i4}});
  const auto missing = validate_value(
      comp, Value::composite({{"current", Value::integer(0)}}));
  REQUIRE(missing.has_value());
  CHECK(missing->path.find("embeddings") != std::string::npos);

  const auto extra = validate_value(
      comp, Value::composite({{"embeddings", Value::tensor({1, 2}, {0, 0})},
                              {"current", Value::integer(0)},
                              {"other", Value::integer(0)}}));
  CHECK(extra.has_value());

  const auto nonfinite = validate_value(
      Space::tensor({2}), Value::tensor({2}, {0.0, std::nan("")}));
  CHECK(nonfinite.has_value());
  CHECK(validate_value(Space::tensor({2}, ElementKind::kInteger),
                       Value::tensor({2}, {1.0, 0.5}))
            .has_value());
}

TEST_CASE("flatten conventions") {
  CHECK(flatten(Space::integer(0, 3), Value::integer(1)) ==
        std::vector<double>{0, 1, 0});
  CHECK(flatten(Space::tensor({2, 2}), Value::tensor({2, 2}, {1, 2, 3, 4})) ==
        std::vector<double>{1, 2, 3, 4});
  // Children flatten in name order regardless of declaration order.
  const Space comp = Space::composite(
      {{"b", Space::integer(0, 2)}, {"a", Space::tensor({1})}});
  const Value v = Value::composite(
      {{"b", Value::integer(1)}, {"a", Value::tensor({1}, {7})}});
  CHECK(flatten(comp, v) == std::vector<double>{7, 0, 1});
  CHECK(unflatten(comp, flatten(comp, v)) == v);
  const std::vector<double> short_flat = {1, 0};
  CHECK_THROWS_AS(unflatten(comp, short_flat), LayoutError);
}

TEST_CASE("flatten round trip on random values") {
  RngStream rng(11);
  const Space s = Space::composite(
      {{"x", Space::tensor({3, 2})},
       {"n", Space::integer(-2, 5)},
       {"inner", Space::composite({{"y", Space::tensor({4}, ElementKind::kInteger)},
                                   {"z", Space::integer(0, 9)}})}});
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(6);
    for (double& e : x) e = rng.normal();
    std::vector<double> y(4);
    for (double& e : y) e = static_cast<double>(rng.uniform_int(std::int64_t{-1}, std::int64_t{9}));
    const Value v = Value::composite(
        {{"x", Value::tensor({3, 2}, x)},
         {"n", Value::integer(rng.uniform_int(std::int64_t{-2}, std::int64_t{4}))},
         {"inner", Value::composite({{"y", Value::tensor({4}, y)},
                                     {"z", Value::integer(rng.uniform_int(std::int64_t{0}, std::int64_t{8}))}})}});
    REQUIRE_FALSE(validate_value(s, v).has_value());
    const auto flat = flatten(s, v);
    CHECK(flat.size() == s.flat_size());
    CHECK(unflatten(s, flat) == v);
  }
}

TEST_CASE("schema json round trip") {
  const CompGraph g = chain(4);
  DeploymentParams p;
  p.devices = {"cpu0", "gpu0", "gpu1"};
  p.input_graph = &g;
  for (auto variant : {SchemaVariant::kGraph, SchemaVariant::kRecurrent}) {
    const SchemaLayout s = build_placement_schema(p, variant);
    CHECK(schema_from_json(to_json(s)) == s);
    CHECK(build_placement_schema(p, variant) == s);
  }
}
