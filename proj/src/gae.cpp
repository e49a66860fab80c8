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

#include "rltask/gae.hpp"

#include <string>

#include "rltask/error.hpp"

namespace rltask {

GaeResult gae_advantages(std::span<const double> rewards,
                         std::span<const double> values,
                         std::span<const std::uint8_t> dones, double gamma,
                         double lambda) {
  const std::size_t n = rewards.size();
  if (values.size() != n || dones.size() != n) {
    throw ShapeError("GAE inputs differ in length: rewards " +
                     std::to_string(n) + ", values " +
                     std::to_string(values.size()) + ", dones " +
                     std::to_string(dones.size()));
  }
  GaeResult out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  double running = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const bool terminal = dones[i] != 0 || i + 1 == n;
    const double next_value = terminal ? 0.0 : values[i + 1];
    const double delta = rewards[i] + gamma * next_value - values[i];
    running = delta + (terminal ? 0.0 : gamma * lambda * running);
    out.advantages[i] = running;
    out.returns[i] = running + values[i];
  }
  return out;
}

}  // namespace rltask
