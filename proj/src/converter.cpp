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

#include "rltask/converter.hpp"

#include <algorithm>

#include "rltask/error.hpp"

namespace rltask {

namespace {

std::vector<int> first_k(const std::vector<int>& ids, int k) {
  std::vector<int> out(k, -1);
  for (int i = 0; i < k && i < static_cast<int>(ids.size()); ++i) {
    out[i] = ids[i];
  }
  return out;
}

}  // namespace

SystemMetrics to_system_metrics(const SimMetrics& sim,
                                const DeviceSet& devices) {
  SystemMetrics m;
  m.run_time = sim.run_time;
  m.valid = sim.valid;
  for (std::size_t d = 0; d < devices.size() && d < sim.peak_memory.size();
       ++d) {
    m.peak_memory_per_device[devices.devices[d].name] = sim.peak_memory[d];
  }
  return m;
}

std::vector<int> input_neighbors(const CompGraph& graph, int op, int k) {
  std::vector<int> ids;
  for (const Edge& e : graph.edges) {
    if (e.consumer == op) ids.push_back(e.producer);
  }
  std::sort(ids.begin(), ids.end());
  return first_k(ids, k);
}

std::vector<int> output_neighbors(const CompGraph& graph, int op, int k) {
  std::vector<int> ids;
  for (const Edge& e : graph.edges) {
    if (e.producer == op) ids.push_back(e.consumer);
  }
  std::sort(ids.begin(), ids.end());
  return first_k(ids, k);
}

PlacementConverter::PlacementConverter(SchemaLayout schema,
                                       ConverterOptions options)
    : schema_(std::move(schema)), options_(options) {
  for (std::size_t i = 0; i < schema_.devices.size(); ++i) {
    device_index_.emplace(schema_.devices[i], static_cast<std::int64_t>(i));
  }
}

Value PlacementConverter::system_to_agent_state(
    const SystemState& state) const {
  if (state.graph == nullptr) throw ConversionError("state has no graph");
  const CompGraph& g = *state.graph;
  const std::size_t n = g.num_ops();
  if (n != schema_.num_ops) {
    throw ConversionError("graph has " + std::to_string(n) +
                          " ops, schema expects " +
                          std::to_string(schema_.num_ops));
  }
  if (state.current_op_index < 0 ||
      static_cast<std::size_t>(state.current_op_index) >= n) {
    throw ConversionError("current op index " +
                          std::to_string(state.current_op_index) +
                          " out of range");
  }
  if (state.partial_placement.size() != n) {
    throw ConversionError("partial placement length mismatch");
  }
  const std::size_t nd = schema_.num_devices();
  for (int d : state.partial_placement) {
    if (d >= static_cast<int>(nd)) {
      throw ConversionError("placement device index " + std::to_string(d) +
                            " out of range");
    }
  }

  if (schema_.variant == SchemaVariant::kRecurrent) {
    std::vector<double> rows(n * nd, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const int d = state.partial_placement[i];
      if (d >= 0) rows[i * nd + d] = 1.0;
    }
    return Value::tensor({n, nd}, std::move(rows));
  }

  const std::size_t opts = schema_.node_options.size();
  const std::size_t width = opts + nd;
  std::vector<double> emb(n * width, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double* row = emb.data() + i * width;
    const int cur = state.current_op_index;
    for (std::size_t o = 0; o < opts; ++o) {
      const std::string& name = schema_.node_options[o];
      if (name == "is_current_node") {
        row[o] = static_cast<int>(i) == cur ? 1.0 : 0.0;
      } else if (name == "is_placed") {
        row[o] = static_cast<int>(i) < cur ? 1.0 : 0.0;
      }
    }
    const int d = state.partial_placement[i];
    if (d >= 0) row[opts + d] = 1.0;
  }

  const int k = schema_.max_neighbors;
  std::vector<double> in_nb(n * k), out_nb(n * k);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ins = input_neighbors(g, static_cast<int>(i), k);
    const auto outs = output_neighbors(g, static_cast<int>(i), k);
    for (int j = 0; j < k; ++j) {
      in_nb[i * k + j] = ins[j];
      out_nb[i * k + j] = outs[j];
    }
  }
  const auto kk = static_cast<std::size_t>(k);
  return Value::composite({
      {"embeddings", Value::tensor({n, width}, std::move(emb))},
      {"current_node_num", Value::integer(state.current_op_index)},
      {"in_neighbors", Value::tensor({n, kk}, std::move(in_nb))},
      {"out_neighbors", Value::tensor({n, kk}, std::move(out_nb))},
  });
}

std::int64_t PlacementConverter::system_to_agent_action(
    std::string_view device_name) const {
  auto it = device_index_.find(device_name);
  if (it == device_index_.end()) {
    throw ConversionError("unknown device '" + std::string(device_name) + "'");
  }
  return it->second;
}

const std::string& PlacementConverter::agent_to_system_action(
    std::int64_t action) const {
  if (action < 0 || action >= static_cast<std::int64_t>(schema_.devices.size())) {
    throw ConversionError("action " + std::to_string(action) +
                          " outside [0, " +
                          std::to_string(schema_.devices.size()) + ")");
  }
  return schema_.devices[action];
}

double PlacementConverter::system_to_agent_reward(
    const SystemMetrics& metrics) const {
  const double run_time =
      metrics.valid ? metrics.run_time : options_.invalid_penalty;
  return options_.reward_transform.apply(-run_time);
}

}  // namespace rltask
