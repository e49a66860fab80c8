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

// Deterministic placement cost model: list scheduling of a computation graph
// over heterogeneous devices with linear compute and transfer costs.

#ifndef RLTASK_SIMULATOR_HPP_
#define RLTASK_SIMULATOR_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "rltask/graph.hpp"
#include "rltask/rng.hpp"

namespace rltask {

inline constexpr double kDefaultInvalidPenalty = 100.0;

struct DeviceSpec {
  std::string name;
  double speed = 1.0;  // work units per second
  std::int64_t memory_capacity = 0;
  bool operator==(const DeviceSpec&) const = default;
};

struct DeviceSet {
  std::vector<DeviceSpec> devices;
  // n x n bytes/second, row-major. The diagonal is ignored (same-device
  // transfers are free).
  std::vector<double> bandwidth;

  std::size_t size() const { return devices.size(); }
  double bandwidth_between(std::size_t a, std::size_t b) const {
    return bandwidth[a * devices.size() + b];
  }
  std::vector<std::string> names() const;
  double max_speed() const;
  // speed > 0, bandwidth symmetric and positive off the diagonal.
  void validate() const;

  bool operator==(const DeviceSet&) const = default;
};

// Every off-diagonal pair gets `bytes_per_second`.
DeviceSet uniform_device_set(std::vector<DeviceSpec> devices,
                             double bytes_per_second);

// Device 0 is the CPU (speed 1, large memory); devices 1..num_gpus are GPUs
// (speed 8, limited memory). GPU-GPU links are twice as fast as CPU-GPU.
DeviceSet default_device_set(int num_gpus = 4);

nlohmann::json to_json(const DeviceSet& devices);
DeviceSet devices_from_json(const nlohmann::json& doc);

struct Placement {
  std::vector<int> assignment;  // op id -> device index
  bool operator==(const Placement&) const = default;
};

Placement single_device_placement(const CompGraph& graph, int device = 0);

struct SimOptions {
  double invalid_penalty = kDefaultInvalidPenalty;
  // Zero-mean multiplicative noise on valid run times; needs `noise`.
  double noise_sigma = 0.0;
  RngStream* noise = nullptr;
};

struct SimMetrics {
  double run_time = 0.0;
  bool valid = true;
  std::vector<double> busy_time;
  std::vector<std::int64_t> peak_memory;
  // Makespan before the penalty substitution and noise.
  double makespan = 0.0;
};

// Ops become ready once every producer has finished and its tensor has
// arrived (output_bytes / bandwidth across devices, free on the same
// device). Each device runs one op at a time, choosing among ready ops by
// (ready time, op id). If a device's resident memory exceeds its capacity
// the placement is invalid and run_time is the penalty.
SimMetrics simulate_runtime(const CompGraph& graph, const Placement& placement,
                            const DeviceSet& devices,
                            const SimOptions& options = {});

// Longest path of compute_cost / max speed.
double critical_path_lower_bound(const CompGraph& graph,
                                 const DeviceSet& devices);

}  // namespace rltask

#endif  // RLTASK_SIMULATOR_HPP_
