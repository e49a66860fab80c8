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

#ifndef RLTASK_GAE_HPP_
#define RLTASK_GAE_HPP_

#include <cstdint>
#include <span>
#include <vector>

namespace rltask {

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;  // advantages + values
};

// Generalized advantage estimation. dones[t] != 0 ends the episode after
// step t; the value past an episode end and past the last step is taken as 0.
GaeResult gae_advantages(std::span<const double> rewards,
                         std::span<const double> values,
                         std::span<const std::uint8_t> dones, double gamma,
                         double lambda);

}  // namespace rltask

#endif  // RLTASK_GAE_HPP_
