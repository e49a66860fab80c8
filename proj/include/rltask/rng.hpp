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

// Seed-stream discipline. Every random draw in an experiment comes from a
// stream derived from (master seed, trial index, role), so workload
// randomness and optimization randomness never share a generator.

#ifndef RLTASK_RNG_HPP_
#define RLTASK_RNG_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace rltask {

enum class StreamRole : std::uint8_t {
  kWorkload = 0,
  kWeightInit = 1,
  kActionSampling = 2,
  kMinibatch = 3,
  // Held-out evaluation instances for the generalization classes.
  kTestWorkload = 4,
  // Multiplicative runtime noise in the simulator, when enabled.
  kMeasurementNoise = 5,
};

inline constexpr StreamRole kAllStreamRoles[] = {
    StreamRole::kWorkload,       StreamRole::kWeightInit,
    StreamRole::kActionSampling, StreamRole::kMinibatch,
    StreamRole::kTestWorkload,   StreamRole::kMeasurementNoise};

std::string_view role_name(StreamRole role);
StreamRole parse_role(std::string_view name);

std::uint64_t splitmix64(std::uint64_t x);

// Uniform random source with distribution code written out explicitly
// (std:: distributions are implementation-defined, which would break
// bit-identical logs across standard libraries).
class RngStream {
 public:
  RngStream() : RngStream(0) {}
  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  // [0, 1) with 53 random bits
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // [0, n); n > 0
  std::uint64_t uniform_int(std::uint64_t n);
  // [lo, hi] inclusive
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  double normal();

  bool operator==(const RngStream& other) const {
    return engine_ == other.engine_;
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// Pure: identical arguments give identical streams; distinct (trial, role)
// pairs give distinct seeds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial,
                          StreamRole role);
RngStream derive_stream(std::uint64_t master, std::uint64_t trial,
                        StreamRole role);

std::string seed_hex(std::uint64_t seed);

}  // namespace rltask

#endif  // RLTASK_RNG_HPP_
