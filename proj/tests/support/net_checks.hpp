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


// Random inputs and finite-difference checks for the policy networks.

#ifndef RLTASK_TESTS_NET_CHECKS_HPP_
#define RLTASK_TESTS_NET_CHECKS_HPP_

#include <cstdint>
#include <memory>
#include <vector>

#include "oracles.hpp"
#include "rltask/categorical.hpp"
#include "rltask/grouper.hpp"
#include "rltask/nn.hpp"
#include "rltask/placer.hpp"
#include "rltask/rng.hpp"

namespace netcheck {

using namespace rltask;

inline std::vector<double> random_vec(RngStream& rng, std::size_t n, double s = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-s, s);
  return v;
}

inline AgentConfig small_grouper() {
  AgentConfig c = AgentConfig::grouper_defaults();
  c.layer_size = 6;
  c.hidden_layers = 2;
  return c;
}

inline AgentConfig small_placer(int rounds) {
  AgentConfig c = AgentConfig::placer_defaults();
  c.layer_size = 5;
  c.aggregation_rounds = rounds;
  return c;
}

// Random grouped graph with sentinel-padded neighbor lists.
inline std::shared_ptr<GroupedGraph> random_grouped(RngStream& rng, int G,
                                             std::size_t width) {
  auto gg = std::make_shared<GroupedGraph>();
  gg->num_groups = G;
  gg->static_features = random_vec(rng, G * width);
  gg->in_neighbors.resize(G);
  gg->out_neighbors.resize(G);
  for (int g = 0; g < G; ++g) {
    for (auto* list : {&gg->in_neighbors[g], &gg->out_neighbors[g]}) {
      for (int j = 0; j < 3; ++j) {
        const int n = static_cast<int>(rng.uniform_int(std::uint64_t(G + 1))) - 1;
        if (n != g) list->push_back(n);
      }
      while (list->size() < 5) list->push_back(-1);
    }
  }
  return gg;
}

inline PlacerObservation random_obs(RngStream& rng, int G, std::size_t width,
                             std::size_t devices) {
  PlacerObservation obs;
  obs.graph = random_grouped(rng, G, width);
  obs.current_group = static_cast<int>(rng.uniform_int(std::uint64_t(G)));
  obs.group_device.assign(G, -1);
  for (int g = 0; g < G; ++g) {
    if (g != obs.current_group && rng.uniform() < 0.5) {
      obs.group_device[g] = static_cast<int>(rng.uniform_int(devices));
    }
  }
  return obs;
}

// Analytic vs central-difference gradient of a scalar built from the
// network's logits and value: f = w . log_softmax(logits) + c * value.
template <class Net, class Obs>
double head_gradient_error(const Net& net, const Obs& obs,
                           const std::vector<double>& params,
                           const std::vector<double>& w, double c) {
  auto f = [&](const std::vector<double>& p) {
    const auto cache = net.forward(p, obs);
    const auto lp = log_softmax(cache.logits);
    double s = c * cache.value;
    for (std::size_t k = 0; k < lp.size(); ++k) s += w[k] * lp[k];
    return s;
  };
  const auto cache = net.forward(params, obs);
  const auto p = softmax(cache.logits);
  double wsum = 0.0;
  for (double x : w) wsum += x;
  std::vector<double> dlogits(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) dlogits[k] = w[k] - wsum * p[k];
  std::vector<double> grad(params.size(), 0.0);
  net.backward(params, obs, cache, dlogits, c, grad);
  return oracle::max_relative_error(grad, oracle::numeric_gradient(f, params));
}

}  // namespace netcheck

#endif  // RLTASK_TESTS_NET_CHECKS_HPP_
