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

#include "rltask/protocol.hpp"

#include "rltask/error.hpp"

namespace rltask {

namespace {

bool is_optimization_role(StreamRole role) {
  return role == StreamRole::kWeightInit ||
         role == StreamRole::kActionSampling ||
         role == StreamRole::kMinibatch ||
         role == StreamRole::kMeasurementNoise;
}

}  // namespace

std::string_view seed_mode_name(SeedMode mode) {
  return mode == SeedMode::kFixed ? "fixed" : "random";
}

const std::array<ProtocolClass, 7>& class_table() {
  using W = WorkloadMode;
  static const std::array<ProtocolClass, 7> table = {{
      {0, SeedMode::kFixed, W::kFixedBlackbox},
      {1, SeedMode::kRandom, W::kFixedBlackbox},
      {2, SeedMode::kRandom, W::kRandomizedBlackbox},
      {3, SeedMode::kRandom, W::kFixedInDistribution},
      {4, SeedMode::kRandom, W::kRandomizedInDistribution},
      {5, SeedMode::kRandom, W::kFixedOutOfDistribution},
      {6, SeedMode::kRandom, W::kRandomizedOutOfDistribution},
  }};
  return table;
}

const ProtocolClass& protocol_class(int k) {
  if (k < 0 || k > 6) {
    throw ProtocolError("class index " + std::to_string(k) + " out of range");
  }
  return class_table()[k];
}

int class_index(SeedMode seed_mode, WorkloadMode workload_mode) {
  for (const auto& c : class_table()) {
    if (c.seed_mode == seed_mode && c.workload_mode == workload_mode) return c.k;
  }
  throw ProtocolError("no class for (" + std::string(seed_mode_name(seed_mode)) +
                      ", " + std::string(workload_mode_name(workload_mode)) +
                      ")");
}

std::uint64_t SeedPlan::seed(std::size_t trial, StreamRole role) const {
  if (seed_mode == SeedMode::kFixed && is_optimization_role(role)) {
    return derive_seed(pinned_optimization_seed, 0, role);
  }
  return derive_seed(master, trial, role);
}

nlohmann::json summary_json(const TrialResult& r) {
  nlohmann::json seeds = nlohmann::json::object();
  for (const auto& [role, seed] : r.seeds) seeds[role] = seed_hex(seed);
  return {{"trial", r.trial},
          {"class", r.class_k},
          {"seeds", seeds},
          {"instance", r.instance},
          {"test_instances", r.test_instances},
          {"initial_run_time", r.train.initial_run_time},
          {"final_run_time", r.train.final_run_time},
          {"best_run_time", r.train.best_run_time},
          {"improvement_final", r.improvement_final},
          {"improvement_best", r.improvement_best},
          {"train_improvement_final", r.train.improvement_final},
          {"greedy_improvement", r.greedy_improvement},
          {"test_improvements", r.test_improvements},
          {"n", r.n},
          {"evaluations", r.train.evaluations},
          {"episodes", r.train.episodes},
          {"grouper_updates", r.train.grouper_updates},
          {"placer_updates", r.train.placer_updates},
          {"invalid_evaluations", r.train.invalid_evaluations},
          {"diverged", r.train.diverged},
          {"stopped_early", r.train.stopped_early}};
}

TrialResult run_trial(const ExperimentConfig& config, std::size_t trial) {
  const ProtocolClass& pc = protocol_class(config.protocol_class);
  const SeedPlan plan{config.master_seed, config.pinned_optimization_seed,
                      pc.seed_mode};
  const DistributionSpec& spec = config.distribution;
  const WorkloadMode mode = pc.workload_mode;

  TrialResult r;
  r.trial = trial;
  r.class_k = pc.k;
  for (StreamRole role : kAllStreamRoles) {
    r.seeds[std::string(role_name(role))] = plan.seed(trial, role);
  }

  RngStream workload = plan.stream(trial, StreamRole::kWorkload);
  TaskInstance train_instance;
  std::vector<TaskInstance> tests;
  if (is_generalization(mode)) {
    // Train in-distribution on the training family; test per the mode.
    train_instance = sample_instance(is_fixed(mode)
                                         ? WorkloadMode::kFixedBlackbox
                                         : WorkloadMode::kRandomizedBlackbox,
                                     spec, workload);
    RngStream test_stream = plan.stream(trial, StreamRole::kTestWorkload);
    tests.push_back(sample_instance(mode, spec, test_stream));
  } else {
    train_instance = sample_instance(mode, spec, workload);
  }
  r.instance = provenance_json(train_instance);
  for (const auto& t : tests) r.test_instances.push_back(provenance_json(t));

  RngStream init = plan.stream(trial, StreamRole::kWeightInit);
  RngStream actions = plan.stream(trial, StreamRole::kActionSampling);
  RngStream minibatch = plan.stream(trial, StreamRole::kMinibatch);
  RngStream noise = plan.stream(trial, StreamRole::kMeasurementNoise);
  HierarchicalAgent agent(train_instance.devices.size(), config.grouper,
                          config.placer, init);
  TrainOptions opt;
  opt.budget = config.budget;
  opt.final_window = config.final_window;
  opt.patience = config.patience;
  opt.reward_mode = config.reward_mode;
  opt.invalid_penalty = config.converter.invalid_penalty;
  opt.noise_sigma = config.noise_sigma;
  opt.reward_transform = config.converter.reward_transform;
  r.train = agent.train(train_instance.graph, train_instance.devices, opt,
                        actions, minibatch, noise);

  const double penalty = config.converter.invalid_penalty;
  r.greedy_improvement =
      agent.evaluate_greedy(train_instance.graph, train_instance.devices,
                            penalty)
          .improvement;
  for (const auto& t : tests) {
    r.test_improvements.push_back(
        agent.evaluate_greedy(t.graph, t.devices, penalty).improvement);
  }
  if (tests.empty()) {
    r.improvement_final = r.train.improvement_final;
  } else {
    double sum = 0.0;
    for (double v : r.test_improvements) sum += v;
    r.improvement_final = sum / static_cast<double>(r.test_improvements.size());
  }
  r.improvement_best = r.train.improvement_best;
  r.n = r.train.transitions;
  r.checkpoint = agent.checkpoint();
  return r;
}

std::vector<TrialResult> run_protocol_class(const ExperimentConfig& config,
                                            int k, std::size_t s,
                                            std::size_t budget) {
  protocol_class(k);
  ExperimentConfig c = config;
  c.protocol_class = k;
  c.trials = s;
  c.budget = budget;
  validate(c);
  std::vector<TrialResult> out;
  for (std::size_t t = 0; t < s; ++t) out.push_back(run_trial(c, t));
  return out;
}

ClassificationRecord classify_trials(const std::vector<TrialResult>& results,
                                     double threshold, int k, bool use_best) {
  std::vector<double> imp;
  std::vector<std::size_t> n;
  for (const auto& r : results) {
    imp.push_back(use_best ? r.improvement_best : r.improvement_final);
    n.push_back(r.n);
  }
  ClassificationRecord rec = classify(imp, n, threshold, k);
  rec.criterion += use_best ? " (best-seen)" : " (final)";
  return rec;
}

std::vector<double> GeneralizationMatrix::present() const {
  std::vector<double> out;
  for (const auto& row : cells) {
    for (const auto& c : row) {
      if (c.improvement) out.push_back(*c.improvement);
    }
  }
  return out;
}

GeneralizationMatrix generalization_matrix(
    const std::vector<const HierarchicalAgent*>& models,
    const std::vector<std::string>& model_ids,
    const std::vector<TaskInstance>& instances,
    const std::vector<std::string>& instance_ids, double invalid_penalty) {
  if (model_ids.size() != models.size() ||
      instance_ids.size() != instances.size()) {
    throw ProtocolError("matrix labels do not match models/instances");
  }
  GeneralizationMatrix m{model_ids, instance_ids, {}};
  for (const HierarchicalAgent* model : models) {
    std::vector<MatrixCell> row;
    for (const auto& inst : instances) {
      MatrixCell cell;
      if (model == nullptr) {
        cell.error = "missing checkpoint";
      } else {
        try {
          cell.improvement =
              model->evaluate_greedy(inst.graph, inst.devices, invalid_penalty)
                  .improvement;
        } catch (const Error& e) {
          cell.error = e.what();
        }
      }
      row.push_back(std::move(cell));
    }
    m.cells.push_back(std::move(row));
  }
  return m;
}

ExperimentConfig de_escalate(const ExperimentConfig& config,
                             const TrialResult& failed, std::size_t trials) {
  if (failed.class_k <= 0) {
    throw ProtocolError("class 0 has no lower class to de-escalate to");
  }
  const nlohmann::json& p = failed.instance;
  if (!p.is_object() || !p.contains("family") || !p.contains("params") ||
      !p.contains("workload_seed")) {
    throw ProtocolError("failed trial " + std::to_string(failed.trial) +
                        " lacks workload provenance");
  }
  ExperimentConfig c = config;
  c.protocol_class = failed.class_k - 1;
  c.trials = trials;
  try {
    c.distribution.family = parse_family(p.at("family").get<std::string>());
    c.distribution.base = params_from_json(p.at("params"));
    c.distribution.pinned_workload_seed =
        p.at("workload_seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("bad workload provenance: ") + e.what());
  }
  // Fresh optimization seeds, still a pure function of the failing run.
  c.master_seed = splitmix64(config.master_seed ^
                             splitmix64(0x5eedULL + failed.trial));
  c.experiment_id = config.experiment_id + "-c" +
                    std::to_string(c.protocol_class) + "-trial" +
                    std::to_string(failed.trial);
  return c;
}

}  // namespace rltask
