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

// Agent configuration, flat parameter bundles, initialization and the Adam
// optimizer shared by the grouper and placer networks.

#ifndef RLTASK_NN_HPP_
#define RLTASK_NN_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rltask/rng.hpp"

namespace rltask {

enum class Activation { kTanh, kRelu };

std::string_view activation_name(Activation a);
Activation parse_activation(std::string_view name);

// In-place activation and its derivative expressed through the output.
void activate(Activation a, std::span<double> x);
double activation_grad_from_output(Activation a, double y);

struct AgentConfig {
  double clip_ratio = 0.2;
  double discount = 1.0;
  double gae_lambda = 1.0;
  int batch_size = 10;  // 0: one full grouping pass (number of ops)
  int update_iterations = 1;
  int minibatch_size = 0;  // 0: full batch
  int layer_size = 32;
  int hidden_layers = 2;
  Activation activation = Activation::kTanh;
  double lr_start = 3e-4;
  double lr_end = 1e-4;
  int linear_decay_steps = 1000;
  int num_groups = 20;
  int num_in_neighbors = 5;
  int num_out_neighbors = 5;
  int aggregation_rounds = 10;
  int groups_per_evaluation = 10;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  bool normalize_advantages = true;

  // Grouper: clip 0.25, lr 0.01 -> 1e-5 over 600 updates, 10 iterations per
  // batch, 20 groups, 2 x 32 tanh layers.
  static AgentConfig grouper_defaults();
  // Placer: clip 0.2, lr 3e-4 -> 1e-4 over 1000 updates, batch 10, one
  // iteration, 10 aggregation rounds, 5 in/out neighbors.
  static AgentConfig placer_defaults();

  void validate() const;
  // Linear from lr_start to lr_end over linear_decay_steps, then constant.
  double learning_rate(std::size_t update) const;

  bool operator==(const AgentConfig&) const = default;
};

nlohmann::json to_json(const AgentConfig& config);
// Missing keys keep the values of `defaults`.
AgentConfig agent_config_from_json(const nlohmann::json& doc,
                                   const AgentConfig& defaults);

struct ParamSlice {
  std::string name;
  std::size_t offset = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t fan_in = 0;

  std::size_t size() const { return rows * cols; }
  bool operator==(const ParamSlice&) const = default;
};

class ParamLayout {
 public:
  std::size_t add(std::string name, std::size_t rows, std::size_t cols,
                  std::size_t fan_in);
  const ParamSlice& operator[](std::size_t i) const { return slices_[i]; }
  const ParamSlice& find(std::string_view name) const;
  const std::vector<ParamSlice>& slices() const { return slices_; }
  std::size_t total() const { return total_; }

  bool operator==(const ParamLayout&) const = default;

 private:
  std::vector<ParamSlice> slices_;
  std::size_t total_ = 0;
};

// Flat parameter vector with named per-layer slices.
struct PolicyParams {
  ParamLayout layout;
  std::vector<double> values;

  std::span<double> slice(std::size_t i) {
    const ParamSlice& s = layout[i];
    return {values.data() + s.offset, s.size()};
  }
  std::span<const double> slice(std::size_t i) const {
    const ParamSlice& s = layout[i];
    return {values.data() + s.offset, s.size()};
  }
};

// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] per slice.
PolicyParams init_params(const ParamLayout& layout, RngStream& rng);

nlohmann::json to_json(const PolicyParams& params);
PolicyParams params_from_json(const nlohmann::json& doc,
                              const ParamLayout& expected);

inline std::span<const double> view(std::span<const double> all,
                                    const ParamSlice& s) {
  return all.subspan(s.offset, s.size());
}
inline std::span<double> view(std::span<double> all, const ParamSlice& s) {
  return all.subspan(s.offset, s.size());
}

class AdamOptimizer {
 public:
  explicit AdamOptimizer(std::size_t size, double beta1 = 0.9,
                         double beta2 = 0.999, double eps = 1e-8);

  void step(std::span<double> params, std::span<const double> grad, double lr);
  std::size_t steps() const { return t_; }

 private:
  std::vector<double> m_;
  std::vector<double> v_;
  std::size_t t_ = 0;
  double beta1_;
  double beta2_;
  double eps_;
};

}  // namespace rltask

#endif  // RLTASK_NN_HPP_
