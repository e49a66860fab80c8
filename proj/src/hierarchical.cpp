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

#include "rltask/hierarchical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "rltask/error.hpp"

namespace rltask {

namespace {

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

std::vector<int> to_ints(const Tensor& t) {
  std::vector<int> out;
  out.reserve(t.data.size());
  for (double d : t.data) out.push_back(static_cast<int>(d));
  return out;
}

Value int_tensor(std::vector<std::size_t> shape, const std::vector<int>& v) {
  return Value::tensor(std::move(shape), std::vector<double>(v.begin(), v.end()));
}

Value neighbor_tensor(const std::vector<std::vector<int>>& lists, int k) {
  const std::size_t rows = lists.size();
  const std::size_t cols = static_cast<std::size_t>(k);
  std::vector<double> data(rows * cols, kNeighborSentinel);
  for (std::size_t g = 0; g < rows; ++g) {
    for (std::size_t j = 0; j < lists[g].size() && j < cols; ++j) {
      data[g * cols + j] = lists[g][j];
    }
  }
  return Value::tensor({rows, cols}, std::move(data));
}

std::vector<std::vector<int>> neighbor_lists(const Tensor& t) {
  const std::size_t rows = t.shape.at(0);
  const std::size_t cols = t.shape.size() > 1 ? t.shape[1] : 0;
  std::vector<std::vector<int>> out(rows);
  for (std::size_t g = 0; g < rows; ++g) {
    for (std::size_t j = 0; j < cols; ++j) {
      out[g].push_back(static_cast<int>(t.data[g * cols + j]));
    }
  }
  return out;
}

}  // namespace

HierarchicalAgent::HierarchicalAgent(std::size_t num_devices,
                                     AgentConfig grouper, AgentConfig placer,
                                     RngStream& weight_init)
    : num_devices_(num_devices),
      gcfg_((grouper.validate(), grouper)),
      pcfg_((placer.validate(), placer)),
      grouper_(kOpFeatureWidth, static_cast<std::size_t>(grouper.num_groups),
               grouper),
      placer_(kGroupStaticWidth, num_devices, placer),
      gparams_(init_params(grouper_.layout(), weight_init)),
      pparams_(init_params(placer_.layout(), weight_init)),
      gopt_(gparams_.values.size()),
      popt_(pparams_.values.size()) {}

TrainResult HierarchicalAgent::train(const CompGraph& graph,
                                     const DeviceSet& devices,
                                     const TrainOptions& opt,
                                     RngStream& actions, RngStream& minibatch,
                                     RngStream& noise) {
  if (devices.size() != num_devices_) {
    throw ShapeError("agent built for " + std::to_string(num_devices_) +
                     " devices, environment has " +
                     std::to_string(devices.size()));
  }
  if (opt.budget < 1) throw ConfigError("training budget must be >= 1");
  if (opt.final_window < 1) throw ConfigError("final window must be >= 1");

  EnvOptions eo;
  eo.reward_mode = opt.reward_mode;
  eo.groups_per_evaluation = pcfg_.groups_per_evaluation;
  eo.invalid_penalty = opt.invalid_penalty;
  eo.noise_sigma = opt.noise_sigma;
  eo.reward_transform = opt.reward_transform;
  PlacementEnv env(graph, devices, eo, noise);

  const std::size_t n = graph.num_ops();
  const int G = gcfg_.num_groups;
  const std::vector<double> feats = op_feature_matrix(graph);
  const std::size_t placer_batch =
      pcfg_.batch_size > 0 ? static_cast<std::size_t>(pcfg_.batch_size) : n;

  TrainResult r;
  std::vector<Sample<PlacerObservation>> pbuf;
  std::vector<double> finals;
  double best = std::numeric_limits<double>::infinity();
  std::size_t last_improvement = 0;

  while (r.evaluations < opt.budget) {
    Trajectory<std::vector<double>> gtraj;
    Grouping grouping;
    grouping.num_groups = G;
    grouping.group_of_op.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> row(feats.begin() + i * kOpFeatureWidth,
                              feats.begin() + (i + 1) * kOpFeatureWidth);
      const auto cache = grouper_.forward(gparams_.values, row);
      const ActionSample s = sample_action(cache.logits, actions);
      grouping.group_of_op[i] = s.action;
      gtraj.push_back({std::move(row), s.action, s.log_prob, 0.0, cache.value,
                       false});
    }
    env.reset(grouping);
    r.initial_run_time = env.initial_run_time();

    auto gg = std::make_shared<const GroupedGraph>(build_grouped_graph(
        graph, grouping, pcfg_.num_in_neighbors, pcfg_.num_out_neighbors));
    std::vector<int> gdev(G, -1);
    Trajectory<PlacerObservation> ptraj;
    const std::vector<int> order = env.group_order();
    std::size_t pos = 0;
    bool truncated = false;
    double final_rt = 0.0;
    bool final_valid = false;
    while (!env.done()) {
      if (r.evaluations >= opt.budget) {
        truncated = true;
        break;
      }
      const std::size_t k = env.decisions_for_next_step();
      std::vector<int> decisions;
      for (std::size_t j = 0; j < k; ++j) {
        const int g = order[pos + j];
        PlacerObservation ob{gg, g, gdev};
        const auto cache = placer_.forward(pparams_.values, ob);
        const ActionSample s = sample_action(cache.logits, actions);
        ptraj.push_back({std::move(ob), s.action, s.log_prob, 0.0,
                         cache.value, false});
        gdev[g] = s.action;
        decisions.push_back(s.action);
      }
      pos += k;
      const StepResult sr = env.step(decisions);
      ++r.evaluations;
      ++r.transitions;
      ptraj.back().reward = sr.reward;
      r.steps.push_back({r.evaluations, r.episodes, sr.metrics.run_time,
                         sr.metrics.valid, sr.done});
      if (!sr.metrics.valid) ++r.invalid_evaluations;
      if (sr.metrics.valid && sr.metrics.run_time < best) {
        best = sr.metrics.run_time;
        last_improvement = r.evaluations;
      }
      if (sr.done) {
        final_rt = sr.metrics.run_time;
        final_valid = sr.metrics.valid;
      }
    }
    if (truncated) break;
    ++r.episodes;
    if (final_valid) finals.push_back(final_rt);

    if (opt.train_grouper) {
      // Relative improvement of the finished episode, floored at -1 so an
      // invalid placement's penalty does not swamp the value head.
      gtraj.back().reward =
          std::max(-1.0, relative_improvement(r.initial_run_time, final_rt));
      gtraj.back().done = true;
      const auto samples =
          to_samples(std::move(gtraj), gcfg_.discount, gcfg_.gae_lambda);
      r.grouper_stats =
          ppo_update(grouper_, gparams_, gopt_,
                     std::span<const Sample<std::vector<double>>>(samples),
                     gcfg_, g_updates_++, minibatch);
    }
    if (opt.train_placer) {
      ptraj.back().done = true;
      auto samples =
          to_samples(std::move(ptraj), pcfg_.discount, pcfg_.gae_lambda);
      std::move(samples.begin(), samples.end(), std::back_inserter(pbuf));
      while (pbuf.size() >= placer_batch) {
        r.placer_stats = ppo_update(
            placer_, pparams_, popt_,
            std::span<const Sample<PlacerObservation>>(pbuf.data(),
                                                       placer_batch),
            pcfg_, p_updates_++, minibatch);
        pbuf.erase(pbuf.begin(), pbuf.begin() + placer_batch);
      }
    }
    if (!all_finite(gparams_.values) || !all_finite(pparams_.values) ||
        !std::isfinite(r.grouper_stats.loss) ||
        !std::isfinite(r.placer_stats.loss)) {
      r.diverged = true;
      break;
    }
    if (opt.patience > 0 &&
        r.evaluations - last_improvement >=
            static_cast<std::size_t>(opt.patience)) {
      r.stopped_early = true;
      break;
    }
  }

  const double penalty = opt.invalid_penalty;
  r.best_run_time = std::isfinite(best) ? best : penalty;
  if (finals.empty()) {
    // No complete episode: fall back to the last valid evaluations.
    for (const auto& s : r.steps) {
      if (s.valid) finals.push_back(s.run_time);
    }
  }
  if (finals.empty()) {
    r.final_run_time = penalty;
  } else {
    const std::size_t w =
        std::min(finals.size(), static_cast<std::size_t>(opt.final_window));
    double sum = 0.0;
    for (std::size_t i = finals.size() - w; i < finals.size(); ++i) {
      sum += finals[i];
    }
    r.final_run_time = sum / static_cast<double>(w);
  }
  r.improvement_best = relative_improvement(r.initial_run_time, r.best_run_time);
  r.improvement_final =
      relative_improvement(r.initial_run_time, r.final_run_time);
  r.grouper_updates = g_updates_;
  r.placer_updates = p_updates_;
  return r;
}

TaskGraphSpec HierarchicalAgent::task_graph(const CompGraph& graph,
                                            SampleMode mode) const {
  const HierarchicalAgent* self = this;
  const CompGraph* g = &graph;

  TaskNode grouper_node;
  grouper_node.name = "grouper";
  grouper_node.kind = PolicyKind::kGrouper;
  grouper_node.policy = [self, mode](const Value& in, RngStream& rng) {
    const Tensor& t = in.as_tensor();
    if (t.shape.size() != 2 || t.shape[1] != self->grouper_.feature_width()) {
      throw ShapeError("grouper input must be [num_ops, " +
                       std::to_string(self->grouper_.feature_width()) + "]");
    }
    const std::size_t n = t.shape[0];
    const std::size_t F = t.shape[1];
    std::vector<int> groups(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto cache = self->grouper_.forward(
          self->gparams_.values,
          std::span<const double>(t.data.data() + i * F, F));
      groups[i] = select_action(cache.logits, rng, mode).action;
    }
    return int_tensor({n}, groups);
  };

  TaskNode placer_node;
  placer_node.name = "placer";
  placer_node.kind = PolicyKind::kPlacer;
  placer_node.pre_transform = [self, g](const Value& in) {
    Grouping grouping;
    grouping.num_groups = self->gcfg_.num_groups;
    grouping.group_of_op = to_ints(in.as_tensor());
    const GroupedGraph gg =
        build_grouped_graph(*g, grouping, self->pcfg_.num_in_neighbors,
                            self->pcfg_.num_out_neighbors);
    const std::vector<int> order = grouping.placement_order();
    const std::size_t G = static_cast<std::size_t>(gg.num_groups);
    return Value::composite(
        {{"group_features",
          Value::tensor({G, kGroupStaticWidth}, gg.static_features)},
         {"group_of_op", in},
         {"in_neighbors",
          neighbor_tensor(gg.in_neighbors, self->pcfg_.num_in_neighbors)},
         {"order", int_tensor({order.size()}, order)},
         {"out_neighbors",
          neighbor_tensor(gg.out_neighbors, self->pcfg_.num_out_neighbors)}});
  };
  placer_node.policy = [self, mode](const Value& in, RngStream& rng) {
    auto gg = std::make_shared<GroupedGraph>();
    const Tensor& feats = in.child("group_features")->as_tensor();
    gg->num_groups = static_cast<int>(feats.shape.at(0));
    gg->static_features = feats.data;
    gg->in_neighbors = neighbor_lists(in.child("in_neighbors")->as_tensor());
    gg->out_neighbors = neighbor_lists(in.child("out_neighbors")->as_tensor());
    std::shared_ptr<const GroupedGraph> shared = gg;
    std::vector<int> gdev(gg->num_groups, -1);
    for (int group : to_ints(in.child("order")->as_tensor())) {
      PlacerObservation ob{shared, group, gdev};
      const auto cache = self->placer_.forward(self->pparams_.values, ob);
      gdev[group] = select_action(cache.logits, rng, mode).action;
    }
    const Value& ops = *in.child("group_of_op");
    return Value::composite(
        {{"group_device",
          int_tensor({static_cast<std::size_t>(gg->num_groups)}, gdev)},
         {"group_of_op", ops}});
  };
  placer_node.post_transform = [](const Value& out) {
    const std::vector<int> gdev =
        to_ints(out.child("group_device")->as_tensor());
    const std::vector<int> groups =
        to_ints(out.child("group_of_op")->as_tensor());
    std::vector<int> placement(groups.size());
    for (std::size_t i = 0; i < groups.size(); ++i) {
      placement[i] = std::max(0, gdev.at(groups[i]));
    }
    return int_tensor({placement.size()}, placement);
  };

  TaskGraphSpec spec = add_subtask({}, std::nullopt, std::move(grouper_node));
  return add_subtask(std::move(spec), "grouper", std::move(placer_node));
}

Placement HierarchicalAgent::place(const CompGraph& graph,
                                   const DeviceSet& devices, SampleMode mode,
                                   RngStream& rng) const {
  if (devices.size() != num_devices_) {
    throw ShapeError("agent built for " + std::to_string(num_devices_) +
                     " devices, instance has " +
                     std::to_string(devices.size()));
  }
  const TaskGraphSpec spec = task_graph(graph, mode);
  std::map<std::string, Value> inputs;
  inputs.emplace("grouper", Value::tensor({graph.num_ops(), kOpFeatureWidth},
                                          op_feature_matrix(graph)));
  std::map<std::string, RngStream> streams{{"grouper", rng}, {"placer", rng}};
  const auto outputs = execute(spec, inputs, streams);
  rng = streams.at("placer");
  return Placement{to_ints(outputs.at("placer").as_tensor())};
}

GreedyEvaluation HierarchicalAgent::evaluate_greedy(
    const CompGraph& graph, const DeviceSet& devices,
    double invalid_penalty) const {
  RngStream unused(0);
  GreedyEvaluation e;
  e.placement = place(graph, devices, SampleMode::kGreedy, unused);
  const SimOptions so{invalid_penalty, 0.0, nullptr};
  e.initial_run_time =
      simulate_runtime(graph, single_device_placement(graph), devices, so)
          .run_time;
  const SimMetrics m = simulate_runtime(graph, e.placement, devices, so);
  e.run_time = m.run_time;
  e.valid = m.valid;
  e.improvement = relative_improvement(e.initial_run_time, e.run_time);
  return e;
}

nlohmann::json HierarchicalAgent::checkpoint() const {
  return {{"format", "rltask-checkpoint"},
          {"version", 1},
          {"num_devices", num_devices_},
          {"grouper",
           {{"config", to_json(gcfg_)},
            {"params", to_json(gparams_)},
            {"updates", g_updates_}}},
          {"placer",
           {{"config", to_json(pcfg_)},
            {"params", to_json(pparams_)},
            {"updates", p_updates_}}}};
}

HierarchicalAgent HierarchicalAgent::from_checkpoint(
    const nlohmann::json& doc) {
  try {
    if (doc.at("format").get<std::string>() != "rltask-checkpoint" ||
        doc.at("version").get<int>() != 1) {
      throw ShapeError("unsupported checkpoint format");
    }
    const AgentConfig g = agent_config_from_json(
        doc.at("grouper").at("config"), AgentConfig::grouper_defaults());
    const AgentConfig p = agent_config_from_json(
        doc.at("placer").at("config"), AgentConfig::placer_defaults());
    RngStream unused(0);
    HierarchicalAgent agent(doc.at("num_devices").get<std::size_t>(), g, p,
                            unused);
    agent.gparams_ = params_from_json(doc.at("grouper").at("params"),
                                      agent.grouper_.layout());
    agent.pparams_ = params_from_json(doc.at("placer").at("params"),
                                      agent.placer_.layout());
    agent.g_updates_ = doc.at("grouper").at("updates").get<std::size_t>();
    agent.p_updates_ = doc.at("placer").at("updates").get<std::size_t>();
    return agent;
  } catch (const nlohmann::json::exception& e) {
    throw ShapeError(std::string("malformed checkpoint: ") + e.what());
  }
}

}  // namespace rltask
