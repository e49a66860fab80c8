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

#include "rltask/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "rltask/error.hpp"

namespace rltask {

std::vector<std::string> DeviceSet::names() const {
  std::vector<std::string> out;
  out.reserve(devices.size());
  for (const auto& d : devices) out.push_back(d.name);
  return out;
}

double DeviceSet::max_speed() const {
  double m = 0.0;
  for (const auto& d : devices) m = std::max(m, d.speed);
  return m;
}

void DeviceSet::validate() const {
  const std::size_t n = devices.size();
  if (n == 0) throw ConfigError("device set is empty");
  if (bandwidth.size() != n * n) {
    throw ConfigError("bandwidth matrix must be " + std::to_string(n) + "x" +
                      std::to_string(n));
  }
  std::set<std::string> names;
  for (const auto& d : devices) {
    if (!(d.speed > 0.0) || !std::isfinite(d.speed)) {
      throw ConfigError("device '" + d.name + "' needs speed > 0");
    }
    if (d.memory_capacity < 0) {
      throw ConfigError("device '" + d.name + "' has negative memory");
    }
    if (!names.insert(d.name).second) {
      throw ConfigError("duplicate device name '" + d.name + "'");
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      const double bw = bandwidth_between(a, b);
      if (!(bw > 0.0)) throw ConfigError("bandwidth must be positive");
      if (bw != bandwidth_between(b, a)) {
        throw ConfigError("bandwidth matrix must be symmetric");
      }
    }
  }
}

DeviceSet uniform_device_set(std::vector<DeviceSpec> devices,
                             double bytes_per_second) {
  DeviceSet set;
  const std::size_t n = devices.size();
  set.devices = std::move(devices);
  set.bandwidth.assign(n * n, bytes_per_second);
  for (std::size_t i = 0; i < n; ++i) {
    set.bandwidth[i * n + i] = std::numeric_limits<double>::infinity();
  }
  set.validate();
  return set;
}

DeviceSet default_device_set(int num_gpus) {
  // Slow links relative to compute: a scattered placement pays more in
  // transfers than it gains from the faster devices.
  constexpr double kCpuGpuBandwidth = 4.0 * 1024 * 1024;  // bytes/s
  constexpr std::int64_t kCpuMemory = 64LL << 30;
  constexpr std::int64_t kGpuMemory = 48LL << 20;
  DeviceSet set;
  set.devices.push_back({"cpu0", 1.0, kCpuMemory});
  for (int g = 0; g < num_gpus; ++g) {
    set.devices.push_back({"gpu" + std::to_string(g), 8.0, kGpuMemory});
  }
  const std::size_t n = set.devices.size();
  set.bandwidth.assign(n * n, kCpuGpuBandwidth);
  for (std::size_t a = 1; a < n; ++a) {
    for (std::size_t b = 1; b < n; ++b) {
      set.bandwidth[a * n + b] = 2.0 * kCpuGpuBandwidth;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    set.bandwidth[i * n + i] = std::numeric_limits<double>::infinity();
  }
  set.validate();
  return set;
}

nlohmann::json to_json(const DeviceSet& set) {
  nlohmann::json devices = nlohmann::json::array();
  for (const auto& d : set.devices) {
    devices.push_back({{"name", d.name},
                       {"speed", d.speed},
                       {"memory_capacity", d.memory_capacity}});
  }
  const std::size_t n = set.size();
  nlohmann::json bw = nlohmann::json::array();
  for (std::size_t a = 0; a < n; ++a) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t b = 0; b < n; ++b) {
      row.push_back(a == b ? 0.0 : set.bandwidth_between(a, b));
    }
    bw.push_back(std::move(row));
  }
  return {{"devices", std::move(devices)}, {"bandwidth", std::move(bw)}};
}

DeviceSet devices_from_json(const nlohmann::json& doc) {
  try {
    DeviceSet set;
    for (const auto& d : doc.at("devices")) {
      set.devices.push_back({d.at("name").get<std::string>(),
                             d.at("speed").get<double>(),
                             d.at("memory_capacity").get<std::int64_t>()});
    }
    const std::size_t n = set.devices.size();
    set.bandwidth.assign(n * n, std::numeric_limits<double>::infinity());
    const auto& bw = doc.at("bandwidth");
    if (bw.is_number()) {
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
          if (a != b) set.bandwidth[a * n + b] = bw.get<double>();
        }
      }
    } else {
      if (bw.size() != n) throw ConfigError("bandwidth matrix row count");
      for (std::size_t a = 0; a < n; ++a) {
        if (bw[a].size() != n) throw ConfigError("bandwidth matrix row width");
        for (std::size_t b = 0; b < n; ++b) {
          if (a != b) set.bandwidth[a * n + b] = bw[a][b].get<double>();
        }
      }
    }
    set.validate();
    return set;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed device set: ") + e.what());
  }
}

Placement single_device_placement(const CompGraph& graph, int device) {
  return Placement{std::vector<int>(graph.num_ops(), device)};
}

SimMetrics simulate_runtime(const CompGraph& graph, const Placement& placement,
                            const DeviceSet& devices,
                            const SimOptions& options) {
  const std::size_t n = graph.num_ops();
  const std::size_t nd = devices.size();
  if (placement.assignment.size() != n) {
    throw SimulationError("placement covers " +
                          std::to_string(placement.assignment.size()) +
                          " of " + std::to_string(n) + " ops");
  }
  for (int d : placement.assignment) {
    if (d < 0 || static_cast<std::size_t>(d) >= nd) {
      throw SimulationError("placement device index " + std::to_string(d) +
                            " out of range");
    }
  }

  SimMetrics m;
  m.busy_time.assign(nd, 0.0);
  m.peak_memory.assign(nd, 0);
  for (std::size_t i = 0; i < n; ++i) {
    m.peak_memory[placement.assignment[i]] += graph.ops[i].memory_bytes;
  }
  for (std::size_t d = 0; d < nd; ++d) {
    if (m.peak_memory[d] > devices.devices[d].memory_capacity) m.valid = false;
  }

  const auto consumers = graph.consumers();
  std::vector<int> pending(n, 0);
  for (const Edge& e : graph.edges) ++pending[e.consumer];
  std::vector<double> ready(n, 0.0);
  std::vector<double> finish(n, 0.0);
  std::vector<double> device_free(nd, 0.0);
  // per-device ready set ordered by (ready time, op id)
  std::vector<std::set<std::pair<double, int>>> queue(nd);
  for (std::size_t i = 0; i < n; ++i) {
    if (pending[i] == 0) {
      queue[placement.assignment[i]].insert({0.0, static_cast<int>(i)});
    }
  }

  double makespan = 0.0;
  for (std::size_t scheduled = 0; scheduled < n; ++scheduled) {
    // Commit the candidate with the earliest start; its start time bounds
    // the ready time of every op not yet known to be ready.
    int best_dev = -1;
    int best_op = -1;
    double best_start = std::numeric_limits<double>::infinity();
    for (std::size_t d = 0; d < nd; ++d) {
      if (queue[d].empty()) continue;
      const double free = device_free[d];
      // first op already ready when the device frees, else the earliest
      auto it = queue[d].begin();
      const double start = std::max(free, it->first);
      if (start < best_start) {
        best_start = start;
        best_dev = static_cast<int>(d);
        best_op = it->second;
      }
    }
    if (best_dev < 0) throw SimulationError("graph contains a cycle");
    queue[best_dev].erase(queue[best_dev].begin());

    const Op& op = graph.ops[best_op];
    const double duration = op.compute_cost / devices.devices[best_dev].speed;
    const double end = best_start + duration;
    finish[best_op] = end;
    device_free[best_dev] = end;
    m.busy_time[best_dev] += duration;
    makespan = std::max(makespan, end);

    for (int c : consumers[best_op]) {
      const int cd = placement.assignment[c];
      double arrival = end;
      if (cd != best_dev) {
        arrival += static_cast<double>(op.output_bytes) /
                   devices.bandwidth_between(best_dev, cd);
      }
      ready[c] = std::max(ready[c], arrival);
      if (--pending[c] == 0) queue[cd].insert({ready[c], c});
    }
  }

  m.makespan = makespan;
  if (!m.valid) {
    m.run_time = options.invalid_penalty;
  } else {
    m.run_time = makespan;
    if (options.noise_sigma > 0.0 && options.noise != nullptr) {
      const double factor = 1.0 + options.noise_sigma * options.noise->normal();
      m.run_time = std::max(0.0, makespan * factor);
    }
  }
  return m;
}

double critical_path_lower_bound(const CompGraph& graph,
                                 const DeviceSet& devices) {
  const double speed = devices.max_speed();
  std::vector<double> longest(graph.num_ops(), 0.0);
  const auto producers = graph.producers();
  double best = 0.0;
  for (std::size_t i = 0; i < graph.num_ops(); ++i) {
    double in = 0.0;
    for (int p : producers[i]) in = std::max(in, longest[p]);
    longest[i] = in + graph.ops[i].compute_cost / speed;
    best = std::max(best, longest[i]);
  }
  return best;
}

}  // namespace rltask
