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

// Proximal policy optimization over any network exposing
//
//   typename Net::Observation
//   Net::Cache forward(params, const Observation&) const;   // .logits, .value
//   void backward(params, const Observation&, const Cache&,
//                 dlogits, dvalue, grad) const;
//   const ParamLayout& layout() const;

#ifndef RLTASK_PPO_HPP_
#define RLTASK_PPO_HPP_

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "rltask/categorical.hpp"
#include "rltask/error.hpp"
#include "rltask/gae.hpp"
#include "rltask/nn.hpp"
#include "rltask/rng.hpp"

namespace rltask {

template <class Obs>
struct Transition {
  Obs obs;
  int action = 0;
  double log_prob = 0.0;  // under the behavior policy
  double reward = 0.0;
  double value = 0.0;
  bool done = false;
};

template <class Obs>
using Trajectory = std::vector<Transition<Obs>>;

template <class Obs>
struct Sample {
  Obs obs;
  int action = 0;
  double log_prob = 0.0;
  double advantage = 0.0;
  double ret = 0.0;
};

struct PpoStats {
  double loss = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  double learning_rate = 0.0;
  std::size_t batch = 0;
};

// Runs GAE over a trajectory and pairs each transition with its advantage and
// return. The last transition is treated as terminal.
template <class Obs>
std::vector<Sample<Obs>> to_samples(Trajectory<Obs> traj, double gamma,
                                    double lambda) {
  std::vector<double> rewards, values;
  std::vector<std::uint8_t> dones;
  for (const auto& t : traj) {
    if (!std::isfinite(t.reward)) throw ShapeError("non-finite reward");
    if (t.log_prob > 0.0) throw ShapeError("log-prob above zero");
    rewards.push_back(t.reward);
    values.push_back(t.value);
    dones.push_back(t.done ? 1 : 0);
  }
  const GaeResult g = gae_advantages(rewards, values, dones, gamma, lambda);
  std::vector<Sample<Obs>> out;
  out.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out.push_back(Sample<Obs>{std::move(traj[i].obs), traj[i].action,
                              traj[i].log_prob, g.advantages[i],
                              g.returns[i]});
  }
  return out;
}

// Clipped-surrogate loss, averaged over `idx`, and its gradient accumulated
// into grad:
//   -min(rho A, clip(rho, 1-eps, 1+eps) A) + c_v (v - R)^2 - c_e H
template <class Net, class Obs>
PpoStats ppo_loss(const Net& net, std::span<const double> params,
                  std::span<const Sample<Obs>> batch,
                  std::span<const double> advantages,
                  std::span<const std::size_t> idx, const AgentConfig& config,
                  std::span<double> grad) {
  PpoStats s;
  s.batch = idx.size();
  const double inv_n = 1.0 / static_cast<double>(idx.size());
  const double eps = config.clip_ratio;
  std::vector<double> dlogits;
  for (std::size_t i : idx) {
    const Sample<Obs>& x = batch[i];
    const double a = advantages[i];
    auto cache = net.forward(params, x.obs);
    const std::vector<double> lp = log_softmax(cache.logits);
    const double new_lp = lp[x.action];
    const double rho = std::exp(new_lp - x.log_prob);
    const double unclipped = rho * a;
    const double clipped = std::clamp(rho, 1.0 - eps, 1.0 + eps) * a;
    double h = 0.0;
    for (double l : lp) h -= std::exp(l) * l;
    const double verr = cache.value - x.ret;

    s.policy_loss -= std::min(unclipped, clipped) * inv_n;
    s.value_loss += verr * verr * inv_n;
    s.entropy += h * inv_n;
    s.approx_kl += (x.log_prob - new_lp) * inv_n;
    if (std::abs(rho - 1.0) > eps) s.clip_fraction += inv_n;

    // d(loss)/d(new log-prob); zero when the clipped branch is active.
    const double dlp = unclipped <= clipped ? -rho * a * inv_n : 0.0;
    dlogits.assign(lp.size(), 0.0);
    for (std::size_t k = 0; k < lp.size(); ++k) {
      const double p = std::exp(lp[k]);
      dlogits[k] = dlp * ((static_cast<int>(k) == x.action ? 1.0 : 0.0) - p) +
                   config.entropy_coef * inv_n * p * (lp[k] + h);
    }
    const double dvalue = 2.0 * config.value_coef * verr * inv_n;
    net.backward(params, x.obs, cache, dlogits, dvalue, grad);
  }
  s.loss = s.policy_loss + config.value_coef * s.value_loss -
           config.entropy_coef * s.entropy;
  return s;
}

// Advantages scaled to mean 0, std 1 when the config asks for it.
template <class Obs>
std::vector<double> batch_advantages(std::span<const Sample<Obs>> batch,
                                     const AgentConfig& config) {
  std::vector<double> adv;
  adv.reserve(batch.size());
  for (const auto& x : batch) adv.push_back(x.advantage);
  if (config.normalize_advantages && adv.size() > 1) {
    const double mean =
        std::accumulate(adv.begin(), adv.end(), 0.0) / adv.size();
    double var = 0.0;
    for (double a : adv) var += (a - mean) * (a - mean);
    const double sd = std::sqrt(var / adv.size());
    for (double& a : adv) a = (a - mean) / (sd + 1e-8);
  }
  return adv;
}

// update_iterations passes over the batch, each a full-batch Adam step (or a
// sequence of shuffled minibatch steps when config.minibatch_size > 0). The
// learning rate comes from `update`, the caller's per-agent counter.
template <class Net, class Obs>
PpoStats ppo_update(const Net& net, PolicyParams& params, AdamOptimizer& opt,
                    std::span<const Sample<Obs>> batch,
                    const AgentConfig& config, std::size_t update,
                    RngStream& minibatch_rng) {
  if (batch.empty()) throw ShapeError("PPO update on an empty batch");
  const std::vector<double> adv = batch_advantages(batch, config);
  const double lr = config.learning_rate(update);
  const std::size_t n = batch.size();
  const std::size_t mb =
      config.minibatch_size > 0
          ? std::min<std::size_t>(n, static_cast<std::size_t>(config.minibatch_size))
          : n;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> grad(params.values.size());
  PpoStats last;
  for (int it = 0; it < config.update_iterations; ++it) {
    if (mb < n) {
      for (std::size_t i = n - 1; i > 0; --i) {
        std::swap(order[i], order[minibatch_rng.uniform_int(i + 1)]);
      }
    }
    for (std::size_t start = 0; start < n; start += mb) {
      const std::size_t len = std::min(mb, n - start);
      std::fill(grad.begin(), grad.end(), 0.0);
      last = ppo_loss(net, std::span<const double>(params.values), batch,
                      std::span<const double>(adv),
                      std::span<const std::size_t>(order).subspan(start, len),
                      config, std::span<double>(grad));
      opt.step(params.values, grad, lr);
    }
  }
  last.learning_rate = lr;
  last.batch = n;
  return last;
}

}  // namespace rltask

#endif  // RLTASK_PPO_HPP_
