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

// Classification records C_k(n, s, f) and their text grammar:
//
//   C_<k>(n=<n>,s=<s>,f=<f>)        f with exactly two decimals
//   C_<k>(n=<lo>..<hi>,s=<s>,f=<f>) when trials saw different n
//
// parse() recovers the success count as round(f * s), which is exact for
// s <= 100.

#ifndef RLTASK_CLASSIFICATION_HPP_
#define RLTASK_CLASSIFICATION_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

namespace rltask {

inline constexpr double kDefaultThreshold = 0.30;

struct ClassificationRecord {
  int k = 0;
  std::size_t n_min = 0;
  std::size_t n_max = 0;
  std::size_t s = 0;
  std::size_t successes = 0;
  std::string criterion;  // not part of the grammar

  double f() const {
    return s == 0 ? 0.0
                  : static_cast<double>(successes) / static_cast<double>(s);
  }
  bool n_varies() const { return n_min != n_max; }

  bool same_grammar(const ClassificationRecord& o) const {
    return k == o.k && n_min == o.n_min && n_max == o.n_max && s == o.s &&
           successes == o.successes;
  }
};

// Fixed-point decimal text, independent of the global locale.
std::string format_fixed(double value, int decimals);

std::string format_record(const ClassificationRecord& record);
ClassificationRecord parse_record(std::string_view text);

// Success is improvement >= threshold. `n` holds one entry per trial (or a
// single entry shared by all).
ClassificationRecord classify(std::span<const double> improvements,
                              std::span<const std::size_t> n, double threshold,
                              int k);

struct Aggregate {
  double mean = 0.0;
  double std = 0.0;  // population
};

Aggregate aggregate(std::span<const double> values);

}  // namespace rltask

#endif  // RLTASK_CLASSIFICATION_HPP_
