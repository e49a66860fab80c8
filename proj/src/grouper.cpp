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

#include "rltask/grouper.hpp"

#include <algorithm>

#include "rltask/error.hpp"
#include "rltask/kernels.hpp"

namespace rltask {

std::vector<double> op_feature_matrix(const CompGraph& graph) {
  const std::size_t n = graph.num_ops();
  const auto prod = graph.producers();
  const auto cons = graph.consumers();
  double max_cost = 0.0;
  double max_bytes = 0.0;
  double max_mem = 0.0;
  int max_layer = 0;
  int max_step = 0;
  std::size_t max_in = 1;
  std::size_t max_out = 1;
  for (const Op& op : graph.ops) {
    max_cost = std::max(max_cost, op.compute_cost);
    max_bytes = std::max(max_bytes, static_cast<double>(op.output_bytes));
    max_mem = std::max(max_mem, static_cast<double>(op.memory_bytes));
    max_layer = std::max(max_layer, op.layer);
    max_step = std::max(max_step, op.step);
  }
  for (std::size_t i = 0; i < n; ++i) {
    max_in = std::max(max_in, prod[i].size());
    max_out = std::max(max_out, cons[i].size());
  }
  auto frac = [](double v, double m) { return m > 0.0 ? v / m : 0.0; };
  std::vector<double> out(n * kOpFeatureWidth, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Op& op = graph.ops[i];
    double* row = out.data() + i * kOpFeatureWidth;
    row[op_kind_index(op.kind)] = 1.0;
    double* f = row + kNumOpKinds;
    f[0] = frac(op.compute_cost, max_cost);
    f[1] = frac(static_cast<double>(op.output_bytes), max_bytes);
    f[2] = frac(static_cast<double>(op.memory_bytes), max_mem);
    f[3] = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
    f[4] = static_cast<double>(op.layer + 1) / (max_layer + 2);
    f[5] = static_cast<double>(op.step + 1) / (max_step + 2);
    f[6] = static_cast<double>(prod[i].size()) / static_cast<double>(max_in);
    f[7] = static_cast<double>(cons[i].size()) / static_cast<double>(max_out);
  }
  return out;
}

GrouperNet::GrouperNet(std::size_t feature_width, std::size_t num_outputs,
                       const AgentConfig& config)
    : feature_width_(feature_width),
      num_outputs_(num_outputs),
      activation_(config.activation) {
  if (feature_width == 0 || num_outputs == 0) {
    throw ShapeError("grouper needs positive feature and output widths");
  }
  std::size_t in = feature_width;
  for (int l = 0; l < config.hidden_layers; ++l) {
    const std::size_t out = static_cast<std::size_t>(config.layer_size);
    const std::string tag = "hidden" + std::to_string(l);
    Dense d{layout_.add(tag + ".w", out, in, in),
            layout_.add(tag + ".b", out, 1, in), in, out};
    trunk_.push_back(d);
    in = out;
  }
  policy_ = {layout_.add("policy.w", num_outputs, in, in),
             layout_.add("policy.b", num_outputs, 1, in), in, num_outputs};
  value_ = {layout_.add("value.w", 1, in, in), layout_.add("value.b", 1, 1, in),
            in, 1};
}

GrouperNet::Cache GrouperNet::forward(std::span<const double> params,
                                      std::span<const double> features) const {
  if (features.size() != feature_width_) {
    throw ShapeError("grouper expects " + std::to_string(feature_width_) +
                     " features, got " + std::to_string(features.size()));
  }
  if (params.size() != layout_.total()) {
    throw ShapeError("grouper parameter count mismatch");
  }
  Cache c;
  std::span<const double> h = features;
  for (const Dense& d : trunk_) {
    std::vector<double> y(d.out);
    kernels::gemv(view(params, layout_[d.w]), d.out, d.in, h,
                  view(params, layout_[d.b]), y);
    activate(activation_, y);
    c.hidden.push_back(std::move(y));
    h = c.hidden.back();
  }
  c.logits.resize(num_outputs_);
  kernels::gemv(view(params, layout_[policy_.w]), policy_.out, policy_.in, h,
                view(params, layout_[policy_.b]), c.logits);
  c.value = kernels::dot(view(params, layout_[value_.w]), h) +
            params[layout_[value_.b].offset];
  return c;
}

void GrouperNet::backward(std::span<const double> params,
                          std::span<const double> features, const Cache& cache,
                          std::span<const double> dlogits, double dvalue,
                          std::span<double> grad) const {
  if (dlogits.size() != num_outputs_ || grad.size() != layout_.total()) {
    throw ShapeError("grouper backward shape mismatch");
  }
  std::span<const double> h =
      trunk_.empty() ? features : std::span<const double>(cache.hidden.back());
  std::vector<double> dh(h.size(), 0.0);

  kernels::ger_acc(view(grad, layout_[policy_.w]), policy_.out, policy_.in,
                   dlogits, h);
  kernels::axpy(1.0, dlogits, view(grad, layout_[policy_.b]));
  kernels::gemv_t_acc(view(params, layout_[policy_.w]), policy_.out,
                      policy_.in, dlogits, dh);
  const double dv[1] = {dvalue};
  kernels::ger_acc(view(grad, layout_[value_.w]), 1, value_.in, dv, h);
  grad[layout_[value_.b].offset] += dvalue;
  kernels::axpy(dvalue, view(params, layout_[value_.w]), dh);

  for (std::size_t l = trunk_.size(); l-- > 0;) {
    const Dense& d = trunk_[l];
    const std::vector<double>& y = cache.hidden[l];
    std::vector<double> dy(d.out);
    for (std::size_t i = 0; i < d.out; ++i) {
      dy[i] = dh[i] * activation_grad_from_output(activation_, y[i]);
    }
    std::span<const double> below =
        l == 0 ? features : std::span<const double>(cache.hidden[l - 1]);
    kernels::ger_acc(view(grad, layout_[d.w]), d.out, d.in, dy, below);
    kernels::axpy(1.0, dy, view(grad, layout_[d.b]));
    if (l > 0) {
      dh.assign(d.in, 0.0);
      kernels::gemv_t_acc(view(params, layout_[d.w]), d.out, d.in, dy, dh);
    }
  }
}

}  // namespace rltask
