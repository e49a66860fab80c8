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

// Synthetic computation graphs for the placement environment.

#ifndef RLTASK_GRAPH_HPP_
#define RLTASK_GRAPH_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rltask/rng.hpp"

namespace rltask {

enum class GraphFamily { kNmtLike, kCnnLike, kMlpChain };

std::string_view family_name(GraphFamily family);
GraphFamily parse_family(std::string_view name);

struct GraphParams {
  int batch_size = 64;
  int unroll_length = 8;
  int layers = 2;
  int hidden_size = 256;

  bool operator==(const GraphParams&) const = default;
};

// Accepted ranges: batch 16-512, unroll 2-64, layers 1-8, hidden 16-4096.
void validate_params(const GraphParams& params);

// Op kinds in feature order. Featurizers one-hot over this list.
inline constexpr std::string_view kOpKinds[] = {
    "embedding", "encoder_cell", "decoder_cell", "attention",
    "loss",      "conv",         "concat",       "dense"};
inline constexpr int kNumOpKinds = 8;
int op_kind_index(std::string_view kind);

struct Op {
  int id = 0;
  std::string kind;
  std::string name;
  // Work units; seconds on a device of speed 1. Always > 0 and a multiple of
  // kCostQuantum.
  double compute_cost = 0.0;
  std::int64_t output_bytes = 0;
  std::int64_t memory_bytes = 0;
  // Structural position, -1 where it does not apply.
  int layer = -1;
  int step = -1;

  bool operator==(const Op&) const = default;
};

struct Edge {
  int producer = 0;
  int consumer = 0;
  bool operator==(const Edge&) const = default;
};

// Costs live on a 2^-24 grid. With power-of-two device speeds every duration
// and partial sum is exactly representable, so makespans do not depend on
// summation order.
inline constexpr double kCostQuantum = 0x1.0p-24;
double quantize_cost(double cost);

struct CompGraph {
  GraphFamily family = GraphFamily::kMlpChain;
  GraphParams params;
  std::vector<Op> ops;
  std::vector<Edge> edges;

  std::size_t num_ops() const { return ops.size(); }
  // Per-op producer / consumer id lists, ascending.
  std::vector<std::vector<int>> producers() const;
  std::vector<std::vector<int>> consumers() const;
  double total_cost() const;
  // Ids are 0..n-1 in order and every edge runs from lower to higher id.
  void validate() const;

  bool operator==(const CompGraph&) const = default;
};

// Deterministic in (family, params, rng state). Per-op costs carry a
// +/-10% jitter drawn from rng.
CompGraph generate_graph(GraphFamily family, const GraphParams& params,
                         RngStream& rng);

// Closed-form op count of a generated graph.
std::size_t expected_op_count(GraphFamily family, const GraphParams& params);

nlohmann::json to_json(const CompGraph& graph);
CompGraph graph_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const GraphParams& params);
GraphParams params_from_json(const nlohmann::json& doc);

std::string graph_hash(const CompGraph& graph);

}  // namespace rltask

#endif  // RLTASK_GRAPH_HPP_
