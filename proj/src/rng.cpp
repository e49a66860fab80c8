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

#include "rltask/rng.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "rltask/error.hpp"

namespace rltask {

std::string_view role_name(StreamRole role) {
  switch (role) {
    case StreamRole::kWorkload:
      return "workload";
    case StreamRole::kWeightInit:
      return "weight-init";
    case StreamRole::kActionSampling:
      return "action-sampling";
    case StreamRole::kMinibatch:
      return "minibatch";
    case StreamRole::kTestWorkload:
      return "test-workload";
    case StreamRole::kMeasurementNoise:
      return "measurement-noise";
  }
  return "unknown";
}

StreamRole parse_role(std::string_view name) {
  for (StreamRole r : kAllStreamRoles) {
    if (role_name(r) == name) return r;
  }
  throw ConfigError("unknown stream role '" + std::string(name) + "'");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_int(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_int: empty range");
  // rejection sampling keeps the draw exactly uniform
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw std::invalid_argument("uniform_int: hi < lo");
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(uniform_int(span));
}

double RngStream::normal() {
  // Box-Muller, one output per call
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial,
                          StreamRole role) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ splitmix64(trial + 0x51ed270b27a1ULL));
  h = splitmix64(h ^ (static_cast<std::uint64_t>(role) + 1) *
                         0xd1b54a32d192ed03ULL);
  return h;
}

RngStream derive_stream(std::uint64_t master, std::uint64_t trial,
                        StreamRole role) {
  return RngStream(derive_seed(master, trial, role));
}

std::string seed_hex(std::uint64_t seed) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(seed));
  return buf;
}

}  // namespace rltask
