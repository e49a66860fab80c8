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

// Placer policy over a grouped graph.
//
// Each group starts from a projection of its features. For a fixed number of
// rounds every embedding is refreshed from itself plus the masked mean of its
// in-neighbor and out-neighbor embeddings; neighbor lists are summed in
// ascending index order, so any permutation of a list gives bit-identical
// output. The embedding of the group being placed feeds the device-logits
// and value heads.

#ifndef RLTASK_PLACER_HPP_
#define RLTASK_PLACER_HPP_

#include <memory>
#include <span>
#include <vector>

#include "rltask/env.hpp"
#include "rltask/graph.hpp"
#include "rltask/nn.hpp"

namespace rltask {

// mean member-op features, then cost / output bytes / memory / member count
// as fractions of the graph total
inline constexpr std::size_t kGroupStaticWidth = kNumOpKinds + 8 + 4;

struct GroupedGraph {
  int num_groups = 0;
  std::vector<double> static_features;  // num_groups x kGroupStaticWidth
  std::vector<std::vector<int>> in_neighbors;   // entries < 0 are padding
  std::vector<std::vector<int>> out_neighbors;
};

// Neighbors of group g are the other groups joined to it by the most op
// edges (ties to the lower id), at most k per direction.
GroupedGraph build_grouped_graph(const CompGraph& graph,
                                 const Grouping& grouping, int k_in, int k_out);

struct PlacerObservation {
  std::shared_ptr<const GroupedGraph> graph;
  int current_group = 0;
  std::vector<int> group_device;  // -1 while unplaced
};

class PlacerNet {
 public:
  using Observation = PlacerObservation;

  struct Cache {
    std::vector<double> x;                 // G x F inputs
    std::vector<std::vector<double>> emb;  // rounds + 1 of G x H
    std::vector<std::vector<double>> agg_in;
    std::vector<std::vector<double>> agg_out;
    std::vector<double> logits;
    double value = 0.0;
  };

  PlacerNet(std::size_t static_width, std::size_t num_devices,
            const AgentConfig& config);

  const ParamLayout& layout() const { return layout_; }
  std::size_t input_width() const { return input_width_; }
  std::size_t num_devices() const { return num_devices_; }
  int rounds() const { return rounds_; }
  void set_rounds(int rounds) { rounds_ = rounds; }

  Cache forward(std::span<const double> params, const Observation& obs) const;
  void backward(std::span<const double> params, const Observation& obs,
                const Cache& cache, std::span<const double> dlogits,
                double dvalue, std::span<double> grad) const;

 private:
  std::vector<double> inputs(const Observation& obs) const;

  std::size_t static_width_;
  std::size_t num_devices_;
  std::size_t input_width_;
  std::size_t width_;
  int rounds_;
  Activation activation_;
  ParamLayout layout_;
  std::size_t w_in_, b_in_, w_self_, w_nin_, w_nout_, b_msg_;
  std::size_t w_pi_, b_pi_, w_v_, b_v_;
};

}  // namespace rltask

#endif  // RLTASK_PLACER_HPP_
