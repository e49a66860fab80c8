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

#include "rltask/random_search.hpp"

#include <algorithm>

#include "rltask/error.hpp"

namespace rltask {

SearchResult random_search_baseline(const CompGraph& graph,
                                    const DeviceSet& devices,
                                    std::size_t budget, RngStream& rng,
                                    SearchMode mode,
                                    const SimOptions& options) {
  if (budget < 1) throw ConfigError("search budget must be >= 1");
  const std::size_t n = graph.num_ops();
  const std::size_t nd = devices.size();
  SearchResult out;
  Placement p{std::vector<int>(n, 0)};
  bool exhausted = false;
  for (std::size_t i = 0; i < budget && !exhausted; ++i) {
    if (mode == SearchMode::kUniform) {
      for (auto& d : p.assignment) d = static_cast<int>(rng.uniform_int(nd));
    } else if (i > 0) {
      std::size_t k = 0;
      while (k < n && ++p.assignment[k] == static_cast<int>(nd)) {
        p.assignment[k++] = 0;
      }
      if (k == n) break;  // wrapped around
    }
    const SimMetrics m = simulate_runtime(graph, p, devices, options);
    ++out.simulations;
    if (out.simulations == 1 || m.run_time < out.best_run_time) {
      out.best = p;
      out.best_run_time = m.run_time;
      out.best_valid = m.valid;
    }
    out.best_so_far.push_back(out.best_run_time);
    if (mode == SearchMode::kExhaustive) {
      exhausted = std::all_of(p.assignment.begin(), p.assignment.end(),
                              [&](int d) { return d + 1 == static_cast<int>(nd); });
    }
  }
  return out;
}

}  // namespace rltask
