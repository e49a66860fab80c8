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

#include "rltask/instance.hpp"

#include "rltask/error.hpp"

namespace rltask {

namespace {

constexpr std::string_view kModeNames[] = {
    "fixed-blackbox",    "randomized-blackbox",    "fixed-in-dist",
    "randomized-in-dist", "fixed-out-of-dist", "randomized-out-of-dist"};

TaskInstance draw(WorkloadMode mode, GraphFamily family,
                  const DistributionSpec& spec, RngStream& rng) {
  GraphParams params = spec.base;
  params.batch_size = static_cast<int>(
      rng.uniform_int(spec.batch_sizes.lo, spec.batch_sizes.hi));
  params.unroll_length = static_cast<int>(
      rng.uniform_int(spec.unroll_lengths.lo, spec.unroll_lengths.hi));
  const std::uint64_t seed = rng.next_u64();
  TaskInstance inst = make_instance(family, params, seed, spec.devices, mode);
  inst.sampled_knobs = {"batch_size", "unroll_length", "workload_seed"};
  return inst;
}

GraphFamily held_out(const DistributionSpec& spec, WorkloadMode mode) {
  if (!spec.held_out_family) {
    throw ProtocolError(std::string(workload_mode_name(mode)) +
                        " requires a held-out family");
  }
  if (*spec.held_out_family == spec.family) {
    throw ProtocolError("held-out family must differ from training family");
  }
  return *spec.held_out_family;
}

}  // namespace

std::string_view workload_mode_name(WorkloadMode mode) {
  return kModeNames[static_cast<int>(mode)];
}

WorkloadMode parse_workload_mode(std::string_view name) {
  for (int i = 0; i < 6; ++i) {
    if (kModeNames[i] == name) return static_cast<WorkloadMode>(i);
  }
  throw ConfigError("unknown workload mode '" + std::string(name) + "'");
}

bool is_fixed(WorkloadMode mode) {
  return mode == WorkloadMode::kFixedBlackbox ||
         mode == WorkloadMode::kFixedInDistribution ||
         mode == WorkloadMode::kFixedOutOfDistribution;
}

bool is_generalization(WorkloadMode mode) {
  return mode != WorkloadMode::kFixedBlackbox &&
         mode != WorkloadMode::kRandomizedBlackbox;
}

TaskInstance make_instance(GraphFamily family, const GraphParams& params,
                           std::uint64_t workload_seed, DeviceSet devices,
                           WorkloadMode mode) {
  RngStream rng(workload_seed);
  TaskInstance inst;
  inst.graph = generate_graph(family, params, rng);
  inst.devices = std::move(devices);
  inst.mode = mode;
  inst.family = family;
  inst.params = params;
  inst.workload_seed = workload_seed;
  return inst;
}

TaskInstance sample_instance(WorkloadMode mode, const DistributionSpec& spec,
                             RngStream& workload_rng) {
  switch (mode) {
    case WorkloadMode::kFixedBlackbox:
      return make_instance(spec.family, spec.base, spec.pinned_workload_seed,
                           spec.devices, mode);
    case WorkloadMode::kRandomizedBlackbox:
    case WorkloadMode::kRandomizedInDistribution:
      return draw(mode, spec.family, spec, workload_rng);
    case WorkloadMode::kFixedInDistribution: {
      RngStream test(spec.test_workload_seed);
      return draw(mode, spec.family, spec, test);
    }
    case WorkloadMode::kFixedOutOfDistribution: {
      const GraphFamily family = held_out(spec, mode);
      RngStream test(spec.test_workload_seed);
      return draw(mode, family, spec, test);
    }
    case WorkloadMode::kRandomizedOutOfDistribution:
      return draw(mode, held_out(spec, mode), spec, workload_rng);
  }
  throw ProtocolError("unhandled workload mode");
}

nlohmann::json provenance_json(const TaskInstance& inst) {
  return {{"family", std::string(family_name(inst.family))},
          {"params", to_json(inst.params)},
          {"workload_seed", inst.workload_seed},
          {"mode", std::string(workload_mode_name(inst.mode))},
          {"content_hash", inst.content_hash()}};
}

TaskInstance instance_from_provenance(const nlohmann::json& doc,
                                      const DeviceSet& devices) {
  try {
    WorkloadMode mode = WorkloadMode::kFixedBlackbox;
    if (doc.contains("mode")) {
      mode = parse_workload_mode(doc.at("mode").get<std::string>());
    }
    return make_instance(parse_family(doc.at("family").get<std::string>()),
                         params_from_json(doc.at("params")),
                         doc.at("workload_seed").get<std::uint64_t>(), devices,
                         mode);
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("missing workload provenance: ") +
                        e.what());
  }
}

}  // namespace rltask
