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

#ifndef RLTASK_RANDOM_SEARCH_HPP_
#define RLTASK_RANDOM_SEARCH_HPP_

#include <cstddef>
#include <vector>

#include "rltask/rng.hpp"
#include "rltask/simulator.hpp"

namespace rltask {

enum class SearchMode {
  kUniform,     // each op on a uniformly drawn device
  kExhaustive,  // placements in mixed-radix order, op 0 least significant
};

struct SearchResult {
  Placement best;
  double best_run_time = 0.0;
  bool best_valid = false;
  std::size_t simulations = 0;
  std::vector<double> best_so_far;  // one entry per simulation
};

// Best of `budget` simulated placements; the first one found wins ties.
// Exhaustive mode stops early once every placement has been visited.
SearchResult random_search_baseline(const CompGraph& graph,
                                    const DeviceSet& devices,
                                    std::size_t budget, RngStream& rng,
                                    SearchMode mode = SearchMode::kUniform,
                                    const SimOptions& options = {});

}  // namespace rltask

#endif  // RLTASK_RANDOM_SEARCH_HPP_
