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

// Grouper policy: a dense network mapping each op's static features to
// logits over groups, with a value head on the shared trunk.

#ifndef RLTASK_GROUPER_HPP_
#define RLTASK_GROUPER_HPP_

#include <span>
#include <vector>

#include "rltask/graph.hpp"
#include "rltask/nn.hpp"

namespace rltask {

// kind one-hot, normalized cost / output bytes / memory, position in
// topological id order, layer, step, in-degree, out-degree
inline constexpr std::size_t kOpFeatureWidth = kNumOpKinds + 8;

// Row-major num_ops x kOpFeatureWidth.
std::vector<double> op_feature_matrix(const CompGraph& graph);

class GrouperNet {
 public:
  using Observation = std::vector<double>;

  struct Cache {
    std::vector<std::vector<double>> hidden;  // post-activation per layer
    std::vector<double> logits;
    double value = 0.0;
  };

  GrouperNet(std::size_t feature_width, std::size_t num_outputs,
             const AgentConfig& config);

  const ParamLayout& layout() const { return layout_; }
  std::size_t feature_width() const { return feature_width_; }
  std::size_t num_outputs() const { return num_outputs_; }

  Cache forward(std::span<const double> params,
                std::span<const double> features) const;
  // Accumulates d(loss)/d(params) into grad given upstream gradients on the
  // logits and the value output.
  void backward(std::span<const double> params,
                std::span<const double> features, const Cache& cache,
                std::span<const double> dlogits, double dvalue,
                std::span<double> grad) const;

 private:
  struct Dense {
    std::size_t w;
    std::size_t b;
    std::size_t in;
    std::size_t out;
  };

  std::size_t feature_width_;
  std::size_t num_outputs_;
  Activation activation_;
  ParamLayout layout_;
  std::vector<Dense> trunk_;
  Dense policy_{};
  Dense value_{};
};

}  // namespace rltask

#endif  // RLTASK_GROUPER_HPP_
