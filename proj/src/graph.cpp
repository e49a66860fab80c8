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

#include "rltask/graph.hpp"

#include <algorithm>
#include <cmath>

#include "rltask/error.hpp"
#include "rltask/hash.hpp"

namespace rltask {

namespace {

// One work unit is 1e10 floating-point operations.
constexpr double kFlopsPerUnit = 1e10;

class Builder {
 public:
  Builder(CompGraph& graph, RngStream& rng) : graph_(graph), rng_(rng) {}

  int add(std::string kind, std::string name, double flops,
          std::int64_t output_bytes, std::int64_t memory_bytes, int layer,
          int step, std::initializer_list<int> inputs = {}) {
    Op op;
    op.id = static_cast<int>(graph_.ops.size());
    op.kind = std::move(kind);
    op.name = std::move(name);
    const double jitter = rng_.uniform(0.9, 1.1);
    op.compute_cost = quantize_cost(flops * jitter / kFlopsPerUnit);
    op.output_bytes = output_bytes;
    op.memory_bytes = memory_bytes;
    op.layer = layer;
    op.step = step;
    graph_.ops.push_back(std::move(op));
    for (int in : inputs) connect(in, graph_.ops.back().id);
    return graph_.ops.back().id;
  }

  void connect(int producer, int consumer) {
    graph_.edges.push_back(Edge{producer, consumer});
  }

 private:
  CompGraph& graph_;
  RngStream& rng_;
};

std::string cell_name(const char* prefix, int layer, int step) {
  return std::string(prefix) + "/l" + std::to_string(layer) + "/t" +
         std::to_string(step);
}

void build_nmt(const GraphParams& p, Builder& b) {
  const double B = p.batch_size;
  const double H = p.hidden_size;
  const int U = p.unroll_length;
  const int L = p.layers;
  const auto bytes = [](double v) { return static_cast<std::int64_t>(v); };

  const double cell_flops = 16.0 * B * H * H;
  const std::int64_t cell_out = bytes(4.0 * B * H);
  const std::int64_t cell_mem = bytes(32.0 * B * H + 32.0 * H * H / U);

  const int enc_embed = b.add("embedding", "encoder/embedding", 2.0 * B * U * H,
                              bytes(4.0 * B * U * H),
                              bytes(4.0 * B * U * H + 16.0 * H * H), -1, -1);
  std::vector<std::vector<int>> enc(L, std::vector<int>(U));
  for (int t = 0; t < U; ++t) {
    for (int l = 0; l < L; ++l) {
      const int below = l == 0 ? enc_embed : enc[l - 1][t];
      const int id = b.add("encoder_cell", cell_name("encoder", l, t),
                           cell_flops, cell_out, cell_mem, l, t, {below});
      if (t > 0) b.connect(enc[l][t - 1], id);
      enc[l][t] = id;
    }
  }

  const int dec_embed = b.add("embedding", "decoder/embedding", 2.0 * B * U * H,
                              bytes(4.0 * B * U * H),
                              bytes(4.0 * B * U * H + 16.0 * H * H), -1, -1);
  std::vector<std::vector<int>> dec(L, std::vector<int>(U));
  std::vector<int> attn(U);
  for (int t = 0; t < U; ++t) {
    for (int l = 0; l < L; ++l) {
      const int below = l == 0 ? dec_embed : dec[l - 1][t];
      const int id = b.add("decoder_cell", cell_name("decoder", l, t),
                           cell_flops, cell_out, cell_mem, l, t, {below});
      b.connect(t > 0 ? dec[l][t - 1] : enc[l][U - 1], id);
      if (l == 0 && t > 0) b.connect(attn[t - 1], id);
      dec[l][t] = id;
    }
    const int a = b.add("attention", "attention/t" + std::to_string(t),
                        4.0 * B * U * H + 4.0 * B * H * H, bytes(4.0 * B * H),
                        bytes(4.0 * B * U + 8.0 * B * H + 8.0 * H * H / U), -1,
                        t, {dec[L - 1][t]});
    for (int s = 0; s < U; ++s) b.connect(enc[L - 1][s], a);
    attn[t] = a;
  }

  const int loss = b.add("loss", "loss", 8.0 * B * U * H * H, 4,
                         bytes(16.0 * B * U * H + 16.0 * H * H), -1, -1);
  for (int t = 0; t < U; ++t) b.connect(attn[t], loss);
}

void build_cnn(const GraphParams& p, Builder& b) {
  const double B = p.batch_size;
  const double H = p.hidden_size;
  const double C = std::max(4, p.hidden_size / 8);
  const double S = 256.0;  // 16x16 feature map
  const auto bytes = [](double v) { return static_cast<std::int64_t>(v); };

  int prev = b.add("embedding", "input", B * S * C, bytes(4.0 * B * S * C),
                   bytes(4.0 * B * S * C), -1, -1);
  for (int l = 0; l < p.layers; ++l) {
    const std::string block = "block" + std::to_string(l);
    const int a = b.add("conv", block + "/conv3x3", 2.0 * B * S * 9.0 * C * C,
                        bytes(4.0 * B * S * C),
                        bytes(8.0 * B * S * C + 36.0 * C * C), l, -1, {prev});
    const int c = b.add("conv", block + "/conv1x1", 2.0 * B * S * C * C,
                        bytes(4.0 * B * S * C),
                        bytes(8.0 * B * S * C + 4.0 * C * C), l, -1, {prev});
    prev = b.add("concat", block + "/concat", 2.0 * B * S * C,
                 bytes(8.0 * B * S * C), bytes(8.0 * B * S * C), l, -1,
                 {a, c});
  }
  const int fc = b.add("dense", "classifier/dense", 8.0 * B * 2.0 * C * H,
                       bytes(4.0 * B * H), bytes(8.0 * B * H + 8.0 * C * H),
                       -1, -1, {prev});
  b.add("loss", "loss", 8.0 * B * H * H, 4, bytes(16.0 * B * H + 16.0 * H * H),
        -1, -1, {fc});
}

void build_mlp(const GraphParams& p, Builder& b) {
  const double B = p.batch_size;
  const double H = p.hidden_size;
  int prev = -1;
  for (int l = 0; l < p.layers; ++l) {
    const int id = b.add("dense", "dense" + std::to_string(l), 2.0 * B * H * H,
                         static_cast<std::int64_t>(4.0 * B * H),
                         static_cast<std::int64_t>(8.0 * B * H + 4.0 * H * H),
                         l, -1);
    if (prev >= 0) b.connect(prev, id);
    prev = id;
  }
}

}  // namespace

std::string_view family_name(GraphFamily family) {
  switch (family) {
    case GraphFamily::kNmtLike:
      return "nmt-like";
    case GraphFamily::kCnnLike:
      return "cnn-like";
    case GraphFamily::kMlpChain:
      return "mlp-chain";
  }
  return "unknown";
}

GraphFamily parse_family(std::string_view name) {
  if (name == "nmt-like") return GraphFamily::kNmtLike;
  if (name == "cnn-like") return GraphFamily::kCnnLike;
  if (name == "mlp-chain") return GraphFamily::kMlpChain;
  throw ConfigError("unknown graph family '" + std::string(name) + "'");
}

void validate_params(const GraphParams& p) {
  const auto in = [](int v, int lo, int hi) { return v >= lo && v <= hi; };
  if (!in(p.batch_size, 16, 512)) {
    throw ConfigError("batch_size " + std::to_string(p.batch_size) +
                      " outside [16, 512]");
  }
  if (!in(p.unroll_length, 2, 64)) {
    throw ConfigError("unroll_length " + std::to_string(p.unroll_length) +
                      " outside [2, 64]");
  }
  if (!in(p.layers, 1, 8)) {
    throw ConfigError("layers " + std::to_string(p.layers) +
                      " outside [1, 8]");
  }
  if (!in(p.hidden_size, 16, 4096)) {
    throw ConfigError("hidden_size " + std::to_string(p.hidden_size) +
                      " outside [16, 4096]");
  }
}

int op_kind_index(std::string_view kind) {
  for (int i = 0; i < kNumOpKinds; ++i) {
    if (kOpKinds[i] == kind) return i;
  }
  return -1;
}

double quantize_cost(double cost) {
  const double q = std::ldexp(std::round(std::ldexp(cost, 24)), -24);
  return std::max(q, kCostQuantum);
}

std::vector<std::vector<int>> CompGraph::producers() const {
  std::vector<std::vector<int>> out(ops.size());
  for (const Edge& e : edges) out[e.consumer].push_back(e.producer);
  for (auto& v : out) std::sort(v.begin(), v.end());
  return out;
}

std::vector<std::vector<int>> CompGraph::consumers() const {
  std::vector<std::vector<int>> out(ops.size());
  for (const Edge& e : edges) out[e.producer].push_back(e.consumer);
  for (auto& v : out) std::sort(v.begin(), v.end());
  return out;
}

double CompGraph::total_cost() const {
  double s = 0.0;
  for (const Op& op : ops) s += op.compute_cost;
  return s;
}

void CompGraph::validate() const {
  const int n = static_cast<int>(ops.size());
  for (int i = 0; i < n; ++i) {
    if (ops[i].id != i) {
      throw StructureError("op at position " + std::to_string(i) +
                           " has id " + std::to_string(ops[i].id));
    }
    if (!(ops[i].compute_cost > 0.0) || !std::isfinite(ops[i].compute_cost)) {
      throw StructureError("op " + std::to_string(i) +
                           " has non-positive compute cost");
    }
    if (ops[i].output_bytes < 0 || ops[i].memory_bytes < 0) {
      throw StructureError("op " + std::to_string(i) + " has negative bytes");
    }
  }
  for (const Edge& e : edges) {
    if (e.producer < 0 || e.producer >= n || e.consumer < 0 ||
        e.consumer >= n) {
      throw StructureError("edge references unknown op");
    }
    if (e.producer >= e.consumer) {
      throw StructureError("edge " + std::to_string(e.producer) + "->" +
                           std::to_string(e.consumer) +
                           " violates topological id order");
    }
  }
}

CompGraph generate_graph(GraphFamily family, const GraphParams& params,
                         RngStream& rng) {
  validate_params(params);
  CompGraph graph;
  graph.family = family;
  graph.params = params;
  Builder builder(graph, rng);
  switch (family) {
    case GraphFamily::kNmtLike:
      build_nmt(params, builder);
      break;
    case GraphFamily::kCnnLike:
      build_cnn(params, builder);
      break;
    case GraphFamily::kMlpChain:
      build_mlp(params, builder);
      break;
  }
  graph.validate();
  return graph;
}

std::size_t expected_op_count(GraphFamily family, const GraphParams& p) {
  switch (family) {
    case GraphFamily::kNmtLike:
      return 3 + static_cast<std::size_t>(p.unroll_length) *
                     (2 * static_cast<std::size_t>(p.layers) + 1);
    case GraphFamily::kCnnLike:
      return 3 + 3 * static_cast<std::size_t>(p.layers);
    case GraphFamily::kMlpChain:
      return static_cast<std::size_t>(p.layers);
  }
  return 0;
}

nlohmann::json to_json(const GraphParams& p) {
  return {{"batch_size", p.batch_size},
          {"unroll_length", p.unroll_length},
          {"layers", p.layers},
          {"hidden_size", p.hidden_size}};
}

GraphParams params_from_json(const nlohmann::json& doc) {
  GraphParams p;
  p.batch_size = doc.value("batch_size", p.batch_size);
  p.unroll_length = doc.value("unroll_length", p.unroll_length);
  p.layers = doc.value("layers", p.layers);
  p.hidden_size = doc.value("hidden_size", p.hidden_size);
  return p;
}

nlohmann::json to_json(const CompGraph& graph) {
  nlohmann::json ops = nlohmann::json::array();
  for (const Op& op : graph.ops) {
    ops.push_back({{"id", op.id},
                   {"kind", op.kind},
                   {"name", op.name},
                   {"compute_cost", op.compute_cost},
                   {"output_bytes", op.output_bytes},
                   {"memory_bytes", op.memory_bytes},
                   {"layer", op.layer},
                   {"step", op.step}});
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const Edge& e : graph.edges) edges.push_back({e.producer, e.consumer});
  return {{"family", std::string(family_name(graph.family))},
          {"params", to_json(graph.params)},
          {"ops", std::move(ops)},
          {"edges", std::move(edges)}};
}

CompGraph graph_from_json(const nlohmann::json& doc) {
  try {
    CompGraph g;
    g.family = parse_family(doc.at("family").get<std::string>());
    g.params = params_from_json(doc.at("params"));
    for (const auto& o : doc.at("ops")) {
      Op op;
      op.id = o.at("id").get<int>();
      op.kind = o.at("kind").get<std::string>();
      op.name = o.value("name", std::string());
      op.compute_cost = o.at("compute_cost").get<double>();
      op.output_bytes = o.at("output_bytes").get<std::int64_t>();
      op.memory_bytes = o.at("memory_bytes").get<std::int64_t>();
      op.layer = o.value("layer", -1);
      op.step = o.value("step", -1);
      g.ops.push_back(std::move(op));
    }
    for (const auto& e : doc.at("edges")) {
      g.edges.push_back(Edge{e.at(0).get<int>(), e.at(1).get<int>()});
    }
    g.validate();
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw StructureError(std::string("malformed graph document: ") + e.what());
  }
}

std::string graph_hash(const CompGraph& graph) {
  return content_hash(to_json(graph));
}

}  // namespace rltask
