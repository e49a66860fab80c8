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

#include "rltask/categorical.hpp"

#include <algorithm>
#include <cmath>

#include "rltask/error.hpp"

namespace rltask {

std::vector<double> log_softmax(std::span<const double> logits) {
  if (logits.empty()) throw ShapeError("empty logits");
  const double m = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double l : logits) z += std::exp(l - m);
  const double lz = m + std::log(z);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lz;
  return out;
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out = log_softmax(logits);
  for (double& v : out) v = std::exp(v);
  return out;
}

double entropy(std::span<const double> logits) {
  const std::vector<double> lp = log_softmax(logits);
  double h = 0.0;
  for (double l : lp) h -= std::exp(l) * l;
  return h;
}

ActionSample sample_action(std::span<const double> logits, RngStream& rng) {
  const std::vector<double> lp = log_softmax(logits);
  const double u = rng.uniform();
  double acc = 0.0;
  std::size_t pick = lp.size() - 1;
  for (std::size_t i = 0; i < lp.size(); ++i) {
    acc += std::exp(lp[i]);
    if (u < acc) {
      pick = i;
      break;
    }
  }
  // Guard against rounding leaving the tail with zero mass.
  while (pick > 0 && std::exp(lp[pick]) == 0.0) --pick;
  return {static_cast<int>(pick), lp[pick]};
}

ActionSample greedy_action(std::span<const double> logits) {
  const std::vector<double> lp = log_softmax(logits);
  const auto it = std::max_element(lp.begin(), lp.end());
  return {static_cast<int>(it - lp.begin()), *it};
}

ActionSample select_action(std::span<const double> logits, RngStream& rng,
                           SampleMode mode) {
  return mode == SampleMode::kGreedy ? greedy_action(logits)
                                     : sample_action(logits, rng);
}

}  // namespace rltask
