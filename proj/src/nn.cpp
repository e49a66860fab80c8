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

#include "rltask/nn.hpp"

#include <algorithm>
#include <cmath>

#include "rltask/error.hpp"

namespace rltask {

std::string_view activation_name(Activation a) {
  return a == Activation::kTanh ? "tanh" : "relu";
}

Activation parse_activation(std::string_view name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "relu") return Activation::kRelu;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

void activate(Activation a, std::span<double> x) {
  if (a == Activation::kTanh) {
    for (double& v : x) v = std::tanh(v);
  } else {
    for (double& v : x) v = std::max(0.0, v);
  }
}

double activation_grad_from_output(Activation a, double y) {
  return a == Activation::kTanh ? 1.0 - y * y : (y > 0.0 ? 1.0 : 0.0);
}

AgentConfig AgentConfig::grouper_defaults() {
  AgentConfig c;
  c.clip_ratio = 0.25;
  c.discount = 1.0;
  c.gae_lambda = 1.0;
  c.batch_size = 0;
  c.update_iterations = 10;
  c.layer_size = 32;
  c.hidden_layers = 2;
  c.activation = Activation::kTanh;
  c.lr_start = 0.01;
  c.lr_end = 0.00001;
  c.linear_decay_steps = 600;
  c.num_groups = 20;
  // A single grouping pass shares one episode return; centering it away
  // would leave only value-function noise.
  c.normalize_advantages = false;
  return c;
}

AgentConfig AgentConfig::placer_defaults() {
  AgentConfig c;
  c.clip_ratio = 0.2;
  c.discount = 1.0;
  c.gae_lambda = 1.0;
  c.batch_size = 10;
  c.update_iterations = 1;
  c.layer_size = 20;  // num groups
  c.hidden_layers = 1;
  c.activation = Activation::kTanh;
  c.lr_start = 0.0003;
  c.lr_end = 0.0001;
  c.linear_decay_steps = 1000;
  c.num_groups = 20;
  c.num_in_neighbors = 5;
  c.num_out_neighbors = 5;
  c.aggregation_rounds = 10;
  c.groups_per_evaluation = 10;
  return c;
}

void AgentConfig::validate() const {
  if (!(clip_ratio > 0.0 && clip_ratio < 1.0)) {
    throw ConfigError("clip ratio must be in (0, 1)");
  }
  if (!(discount > 0.0 && discount <= 1.0)) {
    throw ConfigError("discount must be in (0, 1]");
  }
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0)) {
    throw ConfigError("GAE lambda must be in [0, 1]");
  }
  if (!(lr_end > 0.0 && lr_start >= lr_end)) {
    throw ConfigError("learning rates need lr_start >= lr_end > 0");
  }
  if (batch_size < 0 || update_iterations < 1 || minibatch_size < 0) {
    throw ConfigError("batch size / update iterations out of range");
  }
  if (layer_size < 1 || hidden_layers < 0 || num_groups < 1) {
    throw ConfigError("layer sizes must be positive");
  }
  if (num_in_neighbors < 0 || num_out_neighbors < 0 ||
      aggregation_rounds < 0 || groups_per_evaluation < 1) {
    throw ConfigError("placer neighborhood settings out of range");
  }
  if (linear_decay_steps < 1) throw ConfigError("linear_decay_steps < 1");
}

double AgentConfig::learning_rate(std::size_t update) const {
  if (update >= static_cast<std::size_t>(linear_decay_steps)) return lr_end;
  const double frac = static_cast<double>(update) /
                      static_cast<double>(linear_decay_steps);
  return lr_start + (lr_end - lr_start) * frac;
}

nlohmann::json to_json(const AgentConfig& c) {
  return {{"clip_ratio", c.clip_ratio},
          {"discount", c.discount},
          {"gae_lambda", c.gae_lambda},
          {"batch_size", c.batch_size},
          {"update_iterations", c.update_iterations},
          {"minibatch_size", c.minibatch_size},
          {"layer_size", c.layer_size},
          {"hidden_layers", c.hidden_layers},
          {"activation", std::string(activation_name(c.activation))},
          {"lr_start", c.lr_start},
          {"lr_end", c.lr_end},
          {"linear_decay_steps", c.linear_decay_steps},
          {"num_groups", c.num_groups},
          {"num_in_neighbors", c.num_in_neighbors},
          {"num_out_neighbors", c.num_out_neighbors},
          {"aggregation_rounds", c.aggregation_rounds},
          {"groups_per_evaluation", c.groups_per_evaluation},
          {"entropy_coef", c.entropy_coef},
          {"value_coef", c.value_coef},
          {"normalize_advantages", c.normalize_advantages}};
}

AgentConfig agent_config_from_json(const nlohmann::json& doc,
                                   const AgentConfig& d) {
  try {
    AgentConfig c = d;
    c.clip_ratio = doc.value("clip_ratio", d.clip_ratio);
    c.discount = doc.value("discount", d.discount);
    c.gae_lambda = doc.value("gae_lambda", d.gae_lambda);
    c.batch_size = doc.value("batch_size", d.batch_size);
    c.update_iterations = doc.value("update_iterations", d.update_iterations);
    c.minibatch_size = doc.value("minibatch_size", d.minibatch_size);
    c.layer_size = doc.value("layer_size", d.layer_size);
    c.hidden_layers = doc.value("hidden_layers", d.hidden_layers);
    if (doc.contains("activation")) {
      c.activation = parse_activation(doc.at("activation").get<std::string>());
    }
    c.lr_start = doc.value("lr_start", d.lr_start);
    c.lr_end = doc.value("lr_end", d.lr_end);
    c.linear_decay_steps = doc.value("linear_decay_steps", d.linear_decay_steps);
    c.num_groups = doc.value("num_groups", d.num_groups);
    c.num_in_neighbors = doc.value("num_in_neighbors", d.num_in_neighbors);
    c.num_out_neighbors = doc.value("num_out_neighbors", d.num_out_neighbors);
    c.aggregation_rounds = doc.value("aggregation_rounds", d.aggregation_rounds);
    c.groups_per_evaluation =
        doc.value("groups_per_evaluation", d.groups_per_evaluation);
    c.entropy_coef = doc.value("entropy_coef", d.entropy_coef);
    c.value_coef = doc.value("value_coef", d.value_coef);
    c.normalize_advantages =
        doc.value("normalize_advantages", d.normalize_advantages);
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed agent config: ") + e.what());
  }
}

std::size_t ParamLayout::add(std::string name, std::size_t rows,
                             std::size_t cols, std::size_t fan_in) {
  slices_.push_back(ParamSlice{std::move(name), total_, rows, cols, fan_in});
  total_ += rows * cols;
  return slices_.size() - 1;
}

const ParamSlice& ParamLayout::find(std::string_view name) const {
  for (const auto& s : slices_) {
    if (s.name == name) return s;
  }
  throw ShapeError("no parameter slice named '" + std::string(name) + "'");
}

PolicyParams init_params(const ParamLayout& layout, RngStream& rng) {
  PolicyParams p{layout, std::vector<double>(layout.total(), 0.0)};
  for (std::size_t i = 0; i < layout.slices().size(); ++i) {
    const double bound =
        1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(
                  1, layout[i].fan_in)));
    for (double& v : p.slice(i)) v = rng.uniform(-bound, bound);
  }
  return p;
}

nlohmann::json to_json(const PolicyParams& params) {
  nlohmann::json slices = nlohmann::json::array();
  for (const auto& s : params.layout.slices()) {
    slices.push_back({{"name", s.name},
                      {"offset", s.offset},
                      {"rows", s.rows},
                      {"cols", s.cols}});
  }
  return {{"slices", slices}, {"values", params.values}};
}

PolicyParams params_from_json(const nlohmann::json& doc,
                              const ParamLayout& expected) {
  try {
    const auto& slices = doc.at("slices");
    if (slices.size() != expected.slices().size()) {
      throw ShapeError("checkpoint has " + std::to_string(slices.size()) +
                       " slices, model expects " +
                       std::to_string(expected.slices().size()));
    }
    for (std::size_t i = 0; i < slices.size(); ++i) {
      const auto& s = expected[i];
      if (slices[i].at("name").get<std::string>() != s.name ||
          slices[i].at("rows").get<std::size_t>() != s.rows ||
          slices[i].at("cols").get<std::size_t>() != s.cols) {
        throw ShapeError("checkpoint slice '" +
                         slices[i].at("name").get<std::string>() +
                         "' does not match model layout");
      }
    }
    PolicyParams p{expected, doc.at("values").get<std::vector<double>>()};
    if (p.values.size() != expected.total()) {
      throw ShapeError("checkpoint parameter count mismatch");
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ShapeError(std::string("malformed parameter dump: ") + e.what());
  }
}

AdamOptimizer::AdamOptimizer(std::size_t size, double beta1, double beta2,
                             double eps)
    : m_(size, 0.0), v_(size, 0.0), beta1_(beta1), beta2_(beta2), eps_(eps) {}

void AdamOptimizer::step(std::span<double> params,
                         std::span<const double> grad, double lr) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw ShapeError("optimizer size mismatch");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    const double mh = m_[i] / c1;
    const double vh = v_[i] / c2;
    params[i] -= lr * mh / (std::sqrt(vh) + eps_);
  }
}

}  // namespace rltask
