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

// Layout descriptors for agent inputs and outputs, values that inhabit them,
// and the device-placement schemas built from deployment parameters.

#ifndef RLTASK_SPACES_HPP_
#define RLTASK_SPACES_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rltask/graph.hpp"

namespace rltask {

// [low, high)
struct IntegerSpace {
  std::int64_t low = 0;
  std::int64_t high = 1;
  bool operator==(const IntegerSpace&) const = default;
};

enum class ElementKind { kReal, kInteger };

// Dense row-major tensor. Integer tensors hold integral values (e.g. index
// tables with -1 sentinels) and flatten to their raw entries.
struct TensorSpace {
  std::vector<std::size_t> shape;
  ElementKind element = ElementKind::kReal;

  std::size_t size() const;
  bool operator==(const TensorSpace&) const = default;
};

struct Space;

// Children are kept sorted by name.
struct CompositeSpace {
  std::vector<std::pair<std::string, Space>> children;
  bool operator==(const CompositeSpace&) const;
};

struct Space {
  std::variant<IntegerSpace, TensorSpace, CompositeSpace> layout;

  static Space integer(std::int64_t low, std::int64_t high);
  static Space tensor(std::vector<std::size_t> shape,
                      ElementKind element = ElementKind::kReal);
  static Space composite(std::vector<std::pair<std::string, Space>> children);

  // Width of flatten() output. Integer spaces one-hot to high - low.
  std::size_t flat_size() const;
  const Space* child(std::string_view name) const;

  bool operator==(const Space&) const = default;
};

struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;
  bool operator==(const Tensor&) const = default;
};

struct Value;

struct CompositeValue {
  std::vector<std::pair<std::string, Value>> children;
  bool operator==(const CompositeValue&) const;
};

struct Value {
  std::variant<std::int64_t, Tensor, CompositeValue> data;

  static Value integer(std::int64_t v) { return Value{v}; }
  static Value tensor(std::vector<std::size_t> shape, std::vector<double> data);
  static Value composite(std::vector<std::pair<std::string, Value>> children);

  bool is_integer() const { return std::holds_alternative<std::int64_t>(data); }
  bool is_tensor() const { return std::holds_alternative<Tensor>(data); }
  bool is_composite() const {
    return std::holds_alternative<CompositeValue>(data);
  }
  std::int64_t as_integer() const;
  const Tensor& as_tensor() const;
  const CompositeValue& as_composite() const;
  const Value* child(std::string_view name) const;

  bool operator==(const Value&) const = default;
};

struct Violation {
  std::string path;  // e.g. "input.embeddings[3]"
  std::string constraint;
  std::string message() const { return path + ": " + constraint; }
};

// Spaces constructed through the factories already hold their invariants;
// this checks hand-assembled ones.
void validate_space(const Space& space);

std::optional<Violation> validate_value(const Space& space, const Value& value);

// Composite children in name order; integers one-hot; tensors row-major.
std::vector<double> flatten(const Space& space, const Value& value);
Value unflatten(const Space& space, std::span<const double> flat);

enum class SchemaVariant { kRecurrent, kGraph };

std::string_view variant_name(SchemaVariant variant);
SchemaVariant parse_variant(std::string_view name);

inline const std::vector<std::string> kDefaultNodeOptions = {"is_current_node",
                                                             "is_placed"};
inline constexpr int kDefaultMaxNeighbors = 5;
// Fill value for unused neighbor slots.
inline constexpr double kNeighborSentinel = -1.0;

struct DeploymentParams {
  std::vector<std::string> devices;
  const CompGraph* input_graph = nullptr;
  int max_neighbors = kDefaultMaxNeighbors;
  std::vector<std::string> node_options = kDefaultNodeOptions;
};

struct SchemaLayout {
  SchemaVariant variant = SchemaVariant::kGraph;
  Space input_space;
  Space output_space;
  std::vector<std::string> devices;
  std::size_t num_ops = 0;
  int max_neighbors = kDefaultMaxNeighbors;
  std::vector<std::string> node_options;

  std::size_t num_devices() const { return devices.size(); }
  bool operator==(const SchemaLayout&) const = default;
};

SchemaLayout build_placement_schema(const DeploymentParams& params,
                                    SchemaVariant variant);

nlohmann::json to_json(const Space& space);
Space space_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const Value& value);
nlohmann::json to_json(const SchemaLayout& schema);
SchemaLayout schema_from_json(const nlohmann::json& doc);

}  // namespace rltask

#endif  // RLTASK_SPACES_HPP_
