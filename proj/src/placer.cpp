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

#include "rltask/placer.hpp"

#include <algorithm>
#include <map>

#include "rltask/error.hpp"
#include "rltask/grouper.hpp"
#include "rltask/kernels.hpp"

namespace rltask {

namespace {

std::vector<int> top_neighbors(const std::map<int, int>& counts, int k) {
  std::vector<std::pair<int, int>> v(counts.begin(), counts.end());
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size() && static_cast<int>(i) < k; ++i) {
    out.push_back(v[i].first);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Valid neighbor ids in ascending order; throws on out-of-range entries.
std::vector<int> canonical(const std::vector<int>& list, int num_groups) {
  std::vector<int> out;
  for (int n : list) {
    if (n < 0) continue;
    if (n >= num_groups) {
      throw ShapeError("neighbor index " + std::to_string(n) +
                       " out of range for " + std::to_string(num_groups) +
                       " groups");
    }
    out.push_back(n);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

GroupedGraph build_grouped_graph(const CompGraph& graph,
                                 const Grouping& grouping, int k_in,
                                 int k_out) {
  const std::size_t n = graph.num_ops();
  if (grouping.group_of_op.size() != n) {
    throw StructureError("grouping does not cover the graph");
  }
  const int G = grouping.num_groups;
  GroupedGraph gg;
  gg.num_groups = G;
  gg.static_features.assign(static_cast<std::size_t>(G) * kGroupStaticWidth,
                            0.0);
  const std::vector<double> feats = op_feature_matrix(graph);
  std::vector<double> count(G, 0.0);
  std::vector<double> cost(G, 0.0), bytes(G, 0.0), mem(G, 0.0);
  double tc = 0.0, tb = 0.0, tm = 0.0;
  for (std::size_t op = 0; op < n; ++op) {
    const int g = grouping.group_of_op[op];
    double* row = gg.static_features.data() + g * kGroupStaticWidth;
    for (std::size_t j = 0; j < kOpFeatureWidth; ++j) {
      row[j] += feats[op * kOpFeatureWidth + j];
    }
    count[g] += 1.0;
    cost[g] += graph.ops[op].compute_cost;
    bytes[g] += static_cast<double>(graph.ops[op].output_bytes);
    mem[g] += static_cast<double>(graph.ops[op].memory_bytes);
    tc += graph.ops[op].compute_cost;
    tb += static_cast<double>(graph.ops[op].output_bytes);
    tm += static_cast<double>(graph.ops[op].memory_bytes);
  }
  auto frac = [](double v, double t) { return t > 0.0 ? v / t : 0.0; };
  for (int g = 0; g < G; ++g) {
    if (count[g] == 0.0) continue;
    double* row = gg.static_features.data() + g * kGroupStaticWidth;
    for (std::size_t j = 0; j < kOpFeatureWidth; ++j) row[j] /= count[g];
    row[kOpFeatureWidth + 0] = frac(cost[g], tc);
    row[kOpFeatureWidth + 1] = frac(bytes[g], tb);
    row[kOpFeatureWidth + 2] = frac(mem[g], tm);
    row[kOpFeatureWidth + 3] = count[g] / static_cast<double>(n);
  }
  std::vector<std::map<int, int>> in_counts(G), out_counts(G);
  for (const Edge& e : graph.edges) {
    const int a = grouping.group_of_op[e.producer];
    const int b = grouping.group_of_op[e.consumer];
    if (a == b) continue;
    ++out_counts[a][b];
    ++in_counts[b][a];
  }
  gg.in_neighbors.resize(G);
  gg.out_neighbors.resize(G);
  for (int g = 0; g < G; ++g) {
    gg.in_neighbors[g] = top_neighbors(in_counts[g], k_in);
    gg.out_neighbors[g] = top_neighbors(out_counts[g], k_out);
  }
  return gg;
}

PlacerNet::PlacerNet(std::size_t static_width, std::size_t num_devices,
                     const AgentConfig& config)
    : static_width_(static_width),
      num_devices_(num_devices),
      input_width_(static_width + 2 + num_devices),
      width_(static_cast<std::size_t>(config.layer_size)),
      rounds_(config.aggregation_rounds),
      activation_(config.activation) {
  if (num_devices == 0) throw ShapeError("placer needs at least one device");
  const std::size_t F = input_width_, H = width_, D = num_devices_;
  w_in_ = layout_.add("embed.w", H, F, F);
  b_in_ = layout_.add("embed.b", H, 1, F);
  w_self_ = layout_.add("message.self.w", H, H, 3 * H);
  w_nin_ = layout_.add("message.in.w", H, H, 3 * H);
  w_nout_ = layout_.add("message.out.w", H, H, 3 * H);
  b_msg_ = layout_.add("message.b", H, 1, 3 * H);
  w_pi_ = layout_.add("policy.w", D, H, H);
  b_pi_ = layout_.add("policy.b", D, 1, H);
  w_v_ = layout_.add("value.w", 1, H, H);
  b_v_ = layout_.add("value.b", 1, 1, H);
}

std::vector<double> PlacerNet::inputs(const Observation& obs) const {
  const GroupedGraph& gg = *obs.graph;
  const std::size_t G = static_cast<std::size_t>(gg.num_groups);
  if (gg.static_features.size() != G * static_width_) {
    throw ShapeError("group feature width mismatch");
  }
  if (obs.group_device.size() != G) {
    throw ShapeError("group_device has " +
                     std::to_string(obs.group_device.size()) +
                     " entries, expected " + std::to_string(G));
  }
  if (obs.current_group < 0 || obs.current_group >= gg.num_groups) {
    throw ShapeError("current group out of range");
  }
  std::vector<double> x(G * input_width_, 0.0);
  for (std::size_t g = 0; g < G; ++g) {
    double* row = x.data() + g * input_width_;
    std::copy_n(gg.static_features.data() + g * static_width_, static_width_,
                row);
    row[static_width_] = static_cast<int>(g) == obs.current_group ? 1.0 : 0.0;
    const int d = obs.group_device[g];
    if (d >= 0) {
      if (static_cast<std::size_t>(d) >= num_devices_) {
        throw ShapeError("device index out of range in observation");
      }
      row[static_width_ + 1] = 1.0;
      row[static_width_ + 2 + d] = 1.0;
    }
  }
  return x;
}

PlacerNet::Cache PlacerNet::forward(std::span<const double> params,
                                    const Observation& obs) const {
  if (params.size() != layout_.total()) {
    throw ShapeError("placer parameter count mismatch");
  }
  const GroupedGraph& gg = *obs.graph;
  const std::size_t G = static_cast<std::size_t>(gg.num_groups);
  const std::size_t H = width_, F = input_width_;
  std::vector<std::vector<int>> nin(G), nout(G);
  for (std::size_t g = 0; g < G; ++g) {
    nin[g] = canonical(gg.in_neighbors.at(g), gg.num_groups);
    nout[g] = canonical(gg.out_neighbors.at(g), gg.num_groups);
  }

  Cache c;
  c.x = inputs(obs);
  c.emb.assign(1, std::vector<double>(G * H));
  for (std::size_t g = 0; g < G; ++g) {
    std::span<double> e(c.emb[0].data() + g * H, H);
    kernels::gemv(view(params, layout_[w_in_]), H, F,
                  std::span<const double>(c.x.data() + g * F, F),
                  view(params, layout_[b_in_]), e);
    activate(activation_, e);
  }

  auto mean_of = [&](const std::vector<double>& emb,
                     const std::vector<int>& ids, double* out) {
    std::fill_n(out, H, 0.0);
    if (ids.empty()) return;
    for (int n : ids) {
      const double* src = emb.data() + static_cast<std::size_t>(n) * H;
      for (std::size_t j = 0; j < H; ++j) out[j] += src[j];
    }
    const double inv = 1.0 / static_cast<double>(ids.size());
    for (std::size_t j = 0; j < H; ++j) out[j] *= inv;
  };

  for (int r = 0; r < rounds_; ++r) {
    const std::vector<double>& prev = c.emb.back();
    std::vector<double> ain(G * H), aout(G * H), next(G * H);
    for (std::size_t g = 0; g < G; ++g) {
      mean_of(prev, nin[g], ain.data() + g * H);
      mean_of(prev, nout[g], aout.data() + g * H);
    }
    for (std::size_t g = 0; g < G; ++g) {
      std::span<double> e(next.data() + g * H, H);
      kernels::gemv(view(params, layout_[w_self_]), H, H,
                    std::span<const double>(prev.data() + g * H, H),
                    view(params, layout_[b_msg_]), e);
      std::vector<double> tmp(H);
      kernels::gemv(view(params, layout_[w_nin_]), H, H,
                    std::span<const double>(ain.data() + g * H, H), {}, tmp);
      kernels::axpy(1.0, tmp, e);
      kernels::gemv(view(params, layout_[w_nout_]), H, H,
                    std::span<const double>(aout.data() + g * H, H), {}, tmp);
      kernels::axpy(1.0, tmp, e);
      activate(activation_, e);
    }
    c.agg_in.push_back(std::move(ain));
    c.agg_out.push_back(std::move(aout));
    c.emb.push_back(std::move(next));
  }

  std::span<const double> h(c.emb.back().data() + obs.current_group * H, H);
  c.logits.resize(num_devices_);
  kernels::gemv(view(params, layout_[w_pi_]), num_devices_, H, h,
                view(params, layout_[b_pi_]), c.logits);
  c.value = kernels::dot(view(params, layout_[w_v_]), h) +
            params[layout_[b_v_].offset];
  return c;
}

void PlacerNet::backward(std::span<const double> params,
                         const Observation& obs, const Cache& cache,
                         std::span<const double> dlogits, double dvalue,
                         std::span<double> grad) const {
  if (dlogits.size() != num_devices_ || grad.size() != layout_.total()) {
    throw ShapeError("placer backward shape mismatch");
  }
  const GroupedGraph& gg = *obs.graph;
  const std::size_t G = static_cast<std::size_t>(gg.num_groups);
  const std::size_t H = width_, F = input_width_;
  const std::size_t cur = static_cast<std::size_t>(obs.current_group);
  std::vector<std::vector<int>> nin(G), nout(G);
  for (std::size_t g = 0; g < G; ++g) {
    nin[g] = canonical(gg.in_neighbors.at(g), gg.num_groups);
    nout[g] = canonical(gg.out_neighbors.at(g), gg.num_groups);
  }

  std::vector<double> de(G * H, 0.0);
  {
    std::span<const double> h(cache.emb.back().data() + cur * H, H);
    std::span<double> dh(de.data() + cur * H, H);
    kernels::ger_acc(view(grad, layout_[w_pi_]), num_devices_, H, dlogits, h);
    kernels::axpy(1.0, dlogits, view(grad, layout_[b_pi_]));
    kernels::gemv_t_acc(view(params, layout_[w_pi_]), num_devices_, H, dlogits,
                        dh);
    const double dv[1] = {dvalue};
    kernels::ger_acc(view(grad, layout_[w_v_]), 1, H, dv, h);
    grad[layout_[b_v_].offset] += dvalue;
    kernels::axpy(dvalue, view(params, layout_[w_v_]), dh);
  }

  std::vector<double> dpre(H), dagg(H);
  for (int r = rounds_; r-- > 0;) {
    const std::vector<double>& out = cache.emb[r + 1];
    const std::vector<double>& in = cache.emb[r];
    std::vector<double> dprev(G * H, 0.0);
    for (std::size_t g = 0; g < G; ++g) {
      bool any = false;
      for (std::size_t j = 0; j < H; ++j) {
        dpre[j] = de[g * H + j] *
                  activation_grad_from_output(activation_, out[g * H + j]);
        any = any || dpre[j] != 0.0;
      }
      if (!any) continue;
      kernels::ger_acc(view(grad, layout_[w_self_]), H, H, dpre,
                       std::span<const double>(in.data() + g * H, H));
      kernels::ger_acc(view(grad, layout_[w_nin_]), H, H, dpre,
                       std::span<const double>(cache.agg_in[r].data() + g * H, H));
      kernels::ger_acc(view(grad, layout_[w_nout_]), H, H, dpre,
                       std::span<const double>(cache.agg_out[r].data() + g * H, H));
      kernels::axpy(1.0, dpre, view(grad, layout_[b_msg_]));
      kernels::gemv_t_acc(view(params, layout_[w_self_]), H, H, dpre,
                          std::span<double>(dprev.data() + g * H, H));
      if (!nin[g].empty()) {
        std::fill(dagg.begin(), dagg.end(), 0.0);
        kernels::gemv_t_acc(view(params, layout_[w_nin_]), H, H, dpre, dagg);
        const double inv = 1.0 / static_cast<double>(nin[g].size());
        for (int n : nin[g]) {
          kernels::axpy(inv, dagg,
                        std::span<double>(dprev.data() + n * H, H));
        }
      }
      if (!nout[g].empty()) {
        std::fill(dagg.begin(), dagg.end(), 0.0);
        kernels::gemv_t_acc(view(params, layout_[w_nout_]), H, H, dpre, dagg);
        const double inv = 1.0 / static_cast<double>(nout[g].size());
        for (int n : nout[g]) {
          kernels::axpy(inv, dagg,
                        std::span<double>(dprev.data() + n * H, H));
        }
      }
    }
    de.swap(dprev);
  }

  for (std::size_t g = 0; g < G; ++g) {
    bool any = false;
    for (std::size_t j = 0; j < H; ++j) {
      dpre[j] = de[g * H + j] * activation_grad_from_output(
                                    activation_, cache.emb[0][g * H + j]);
      any = any || dpre[j] != 0.0;
    }
    if (!any) continue;
    kernels::ger_acc(view(grad, layout_[w_in_]), H, F, dpre,
                     std::span<const double>(cache.x.data() + g * F, F));
    kernels::axpy(1.0, dpre, view(grad, layout_[b_in_]));
  }
}

}  // namespace rltask
