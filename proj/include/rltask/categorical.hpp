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

// Categorical action selection over logits.

#ifndef RLTASK_CATEGORICAL_HPP_
#define RLTASK_CATEGORICAL_HPP_

#include <span>
#include <vector>

#include "rltask/rng.hpp"

namespace rltask {

enum class SampleMode { kStochastic, kGreedy };

struct ActionSample {
  int action = 0;
  double log_prob = 0.0;
};

std::vector<double> log_softmax(std::span<const double> logits);
std::vector<double> softmax(std::span<const double> logits);
double entropy(std::span<const double> logits);

// Inverse-CDF draw using one uniform from `rng`.
ActionSample sample_action(std::span<const double> logits, RngStream& rng);
// Lowest index among the maxima.
ActionSample greedy_action(std::span<const double> logits);
ActionSample select_action(std::span<const double> logits, RngStream& rng,
                           SampleMode mode);

}  // namespace rltask

#endif  // RLTASK_CATEGORICAL_HPP_
