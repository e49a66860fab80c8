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

#include "rltask/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "rltask/error.hpp"

namespace rltask {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

template <class T>
void sort_children(std::vector<std::pair<std::string, T>>& children,
                   const char* what) {
  std::sort(children.begin(), children.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < children.size(); ++i) {
    if (children[i].first == children[i - 1].first) {
      throw LayoutError(std::string("duplicate ") + what + " child '" +
                        children[i].first + "'");
    }
  }
}

std::string join_path(const std::string& base, const std::string& name) {
  return base.empty() ? name : base + "." + name;
}

std::string shape_string(const std::vector<std::size_t>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

std::optional<Violation> validate_at(const Space& space, const Value& value,
                                     const std::string& path) {
  return std::visit(
      Overloaded{
          [&](const IntegerSpace& s) -> std::optional<Violation> {
            if (!value.is_integer()) {
              return Violation{path, "expected integer"};
            }
            const auto v = value.as_integer();
            if (v < s.low || v >= s.high) {
              return Violation{path, "value " + std::to_string(v) +
                                         " outside [" + std::to_string(s.low) +
                                         ", " + std::to_string(s.high) + ")"};
            }
            return std::nullopt;
          },
          [&](const TensorSpace& s) -> std::optional<Violation> {
            if (!value.is_tensor()) return Violation{path, "expected tensor"};
            const Tensor& t = value.as_tensor();
            if (t.shape != s.shape) {
              return Violation{path, "shape " + shape_string(t.shape) +
                                         " != " + shape_string(s.shape)};
            }
            if (t.data.size() != s.size()) {
              return Violation{path, "data length " +
                                         std::to_string(t.data.size()) +
                                         " != " + std::to_string(s.size())};
            }
            for (std::size_t i = 0; i < t.data.size(); ++i) {
              const double x = t.data[i];
              if (!std::isfinite(x)) {
                return Violation{path + "[" + std::to_string(i) + "]",
                                 "non-finite entry"};
              }
              if (s.element == ElementKind::kInteger && x != std::trunc(x)) {
                return Violation{path + "[" + std::to_string(i) + "]",
                                 "non-integral entry"};
              }
            }
            return std::nullopt;
          },
          [&](const CompositeSpace& s) -> std::optional<Violation> {
            if (!value.is_composite()) {
              return Violation{path, "expected composite"};
            }
            const auto& vc = value.as_composite().children;
            for (const auto& [name, child] : s.children) {
              const Value* v = value.child(name);
              if (v == nullptr) {
                return Violation{join_path(path, name), "missing child"};
              }
              if (auto bad = validate_at(child, *v, join_path(path, name))) {
                return bad;
              }
            }
            for (const auto& [name, v] : vc) {
              if (space.child(name) == nullptr) {
                return Violation{join_path(path, name), "undeclared child"};
              }
            }
            return std::nullopt;
          }},
      space.layout);
}

void flatten_into(const Space& space, const Value& value,
                  std::vector<double>& out) {
  std::visit(Overloaded{[&](const IntegerSpace& s) {
                          const std::size_t width = s.high - s.low;
                          const std::size_t hot = value.as_integer() - s.low;
                          for (std::size_t i = 0; i < width; ++i) {
                            out.push_back(i == hot ? 1.0 : 0.0);
                          }
                        },
                        [&](const TensorSpace&) {
                          const auto& d = value.as_tensor().data;
                          out.insert(out.end(), d.begin(), d.end());
                        },
                        [&](const CompositeSpace& s) {
                          for (const auto& [name, child] : s.children) {
                            flatten_into(child, *value.child(name), out);
                          }
                        }},
             space.layout);
}

Value unflatten_at(const Space& space, std::span<const double> flat,
                   std::size_t& pos, const std::string& path) {
  return std::visit(
      Overloaded{
          [&](const IntegerSpace& s) -> Value {
            const std::size_t width = s.high - s.low;
            std::int64_t hot = -1;
            for (std::size_t i = 0; i < width; ++i) {
              const double x = flat[pos + i];
              if (x == 1.0 && hot < 0) {
                hot = static_cast<std::int64_t>(i);
              } else if (x != 0.0) {
                throw LayoutError(path + ": not a one-hot encoding");
              }
            }
            if (hot < 0) throw LayoutError(path + ": empty one-hot encoding");
            pos += width;
            return Value::integer(s.low + hot);
          },
          [&](const TensorSpace& s) -> Value {
            const std::size_t n = s.size();
            std::vector<double> data(flat.begin() + pos,
                                     flat.begin() + pos + n);
            pos += n;
            return Value::tensor(s.shape, std::move(data));
          },
          [&](const CompositeSpace& s) -> Value {
            std::vector<std::pair<std::string, Value>> children;
            for (const auto& [name, child] : s.children) {
              children.emplace_back(
                  name, unflatten_at(child, flat, pos, join_path(path, name)));
            }
            return Value::composite(std::move(children));
          }},
      space.layout);
}

}  // namespace

std::size_t TensorSpace::size() const {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

bool CompositeSpace::operator==(const CompositeSpace& o) const {
  return children == o.children;
}

bool CompositeValue::operator==(const CompositeValue& o) const {
  return children == o.children;
}

Space Space::integer(std::int64_t low, std::int64_t high) {
  if (!(low < high)) {
    throw LayoutError("integer space requires low < high, got [" +
                      std::to_string(low) + ", " + std::to_string(high) + ")");
  }
  return Space{IntegerSpace{low, high}};
}

Space Space::tensor(std::vector<std::size_t> shape, ElementKind element) {
  if (shape.empty()) throw LayoutError("tensor space requires a shape");
  for (std::size_t d : shape) {
    if (d < 1) {
      throw LayoutError("tensor dimension must be >= 1, got shape " +
                        shape_string(shape));
    }
  }
  return Space{TensorSpace{std::move(shape), element}};
}

Space Space::composite(std::vector<std::pair<std::string, Space>> children) {
  sort_children(children, "composite space");
  return Space{CompositeSpace{std::move(children)}};
}

std::size_t Space::flat_size() const {
  return std::visit(
      Overloaded{
          [](const IntegerSpace& s) {
            return static_cast<std::size_t>(s.high - s.low);
          },
          [](const TensorSpace& s) { return s.size(); },
          [](const CompositeSpace& s) {
            std::size_t n = 0;
            for (const auto& [name, child] : s.children) n += child.flat_size();
            return n;
          }},
      layout);
}

const Space* Space::child(std::string_view name) const {
  const auto* c = std::get_if<CompositeSpace>(&layout);
  if (c == nullptr) return nullptr;
  for (const auto& [n, s] : c->children) {
    if (n == name) return &s;
  }
  return nullptr;
}

Value Value::tensor(std::vector<std::size_t> shape, std::vector<double> data) {
  return Value{Tensor{std::move(shape), std::move(data)}};
}

Value Value::composite(std::vector<std::pair<std::string, Value>> children) {
  sort_children(children, "composite value");
  return Value{CompositeValue{std::move(children)}};
}

std::int64_t Value::as_integer() const {
  if (!is_integer()) throw LayoutError("value is not an integer");
  return std::get<std::int64_t>(data);
}

const Tensor& Value::as_tensor() const {
  if (!is_tensor()) throw LayoutError("value is not a tensor");
  return std::get<Tensor>(data);
}

const CompositeValue& Value::as_composite() const {
  if (!is_composite()) throw LayoutError("value is not a composite");
  return std::get<CompositeValue>(data);
}

const Value* Value::child(std::string_view name) const {
  const auto* c = std::get_if<CompositeValue>(&data);
  if (c == nullptr) return nullptr;
  for (const auto& [n, v] : c->children) {
    if (n == name) return &v;
  }
  return nullptr;
}

void validate_space(const Space& space) {
  std::visit(Overloaded{[](const IntegerSpace& s) {
                          Space::integer(s.low, s.high);
                        },
                        [](const TensorSpace& s) {
                          Space::tensor(s.shape, s.element);
                        },
                        [](const CompositeSpace& s) {
                          std::set<std::string> seen;
                          std::string prev;
                          for (const auto& [name, child] : s.children) {
                            if (!seen.insert(name).second) {
                              throw LayoutError("duplicate child '" + name +
                                                "'");
                            }
                            if (!prev.empty() && name < prev) {
                              throw LayoutError("children not in name order");
                            }
                            prev = name;
                            validate_space(child);
                          }
                        }},
             space.layout);
}

std::optional<Violation> validate_value(const Space& space,
                                        const Value& value) {
  return validate_at(space, value, "");
}

std::vector<double> flatten(const Space& space, const Value& value) {
  if (auto bad = validate_value(space, value)) {
    throw LayoutError("cannot flatten invalid value: " + bad->message());
  }
  std::vector<double> out;
  out.reserve(space.flat_size());
  flatten_into(space, value, out);
  return out;
}

Value unflatten(const Space& space, std::span<const double> flat) {
  const std::size_t expected = space.flat_size();
  if (flat.size() != expected) {
    throw LayoutError("flat length mismatch: expected " +
                      std::to_string(expected) + ", got " +
                      std::to_string(flat.size()));
  }
  std::size_t pos = 0;
  return unflatten_at(space, flat, pos, "");
}

std::string_view variant_name(SchemaVariant variant) {
  return variant == SchemaVariant::kGraph ? "graph" : "recurrent";
}

SchemaVariant parse_variant(std::string_view name) {
  if (name == "graph") return SchemaVariant::kGraph;
  if (name == "recurrent") return SchemaVariant::kRecurrent;
  throw ConfigError("unknown schema variant '" + std::string(name) + "'");
}

SchemaLayout build_placement_schema(const DeploymentParams& params,
                                    SchemaVariant variant) {
  if (params.devices.empty()) throw LayoutError("empty device list");
  if (params.input_graph == nullptr || params.input_graph->num_ops() == 0) {
    throw LayoutError("input graph has no operations");
  }
  if (params.max_neighbors < 1) {
    throw LayoutError("max_neighbors must be >= 1");
  }
  {
    std::set<std::string> names(params.devices.begin(), params.devices.end());
    if (names.size() != params.devices.size()) {
      throw LayoutError("duplicate device names");
    }
  }
  const std::size_t num_ops = params.input_graph->num_ops();
  const std::size_t num_devices = params.devices.size();

  SchemaLayout schema;
  schema.variant = variant;
  schema.devices = params.devices;
  schema.num_ops = num_ops;
  schema.max_neighbors = params.max_neighbors;
  schema.node_options = params.node_options;
  schema.output_space =
      Space::integer(0, static_cast<std::int64_t>(num_devices));

  if (variant == SchemaVariant::kRecurrent) {
    schema.input_space = Space::tensor({num_ops, num_devices});
  } else {
    const auto k = static_cast<std::size_t>(params.max_neighbors);
    schema.input_space = Space::composite({
        {"embeddings",
         Space::tensor({num_ops, params.node_options.size() + num_devices})},
        {"current_node_num",
         Space::integer(0, static_cast<std::int64_t>(num_ops))},
        {"in_neighbors", Space::tensor({num_ops, k}, ElementKind::kInteger)},
        {"out_neighbors", Space::tensor({num_ops, k}, ElementKind::kInteger)},
    });
  }
  return schema;
}

nlohmann::json to_json(const Space& space) {
  return std::visit(
      Overloaded{[](const IntegerSpace& s) -> nlohmann::json {
                   return {{"type", "integer"}, {"low", s.low}, {"high", s.high}};
                 },
                 [](const TensorSpace& s) -> nlohmann::json {
                   return {{"type", "tensor"},
                           {"shape", s.shape},
                           {"element", s.element == ElementKind::kInteger
                                           ? "integer"
                                           : "real"}};
                 },
                 [](const CompositeSpace& s) -> nlohmann::json {
                   nlohmann::json children = nlohmann::json::array();
                   for (const auto& [name, child] : s.children) {
                     children.push_back({{"name", name}, {"space", to_json(child)}});
                   }
                   return {{"type", "composite"}, {"children", children}};
                 }},
      space.layout);
}

Space space_from_json(const nlohmann::json& doc) {
  try {
    const std::string type = doc.at("type").get<std::string>();
    if (type == "integer") {
      return Space::integer(doc.at("low").get<std::int64_t>(),
                            doc.at("high").get<std::int64_t>());
    }
    if (type == "tensor") {
      const auto element = doc.value("element", std::string("real")) == "integer"
                               ? ElementKind::kInteger
                               : ElementKind::kReal;
      return Space::tensor(doc.at("shape").get<std::vector<std::size_t>>(),
                           element);
    }
    if (type == "composite") {
      std::vector<std::pair<std::string, Space>> children;
      for (const auto& c : doc.at("children")) {
        children.emplace_back(c.at("name").get<std::string>(),
                              space_from_json(c.at("space")));
      }
      return Space::composite(std::move(children));
    }
    throw LayoutError("unknown space type '" + type + "'");
  } catch (const nlohmann::json::exception& e) {
    throw LayoutError(std::string("malformed space document: ") + e.what());
  }
}

nlohmann::json to_json(const Value& value) {
  return std::visit(
      Overloaded{[](std::int64_t v) -> nlohmann::json { return v; },
                 [](const Tensor& t) -> nlohmann::json {
                   return {{"shape", t.shape}, {"data", t.data}};
                 },
                 [](const CompositeValue& c) -> nlohmann::json {
                   nlohmann::json out = nlohmann::json::object();
                   for (const auto& [name, v] : c.children) out[name] = to_json(v);
                   return out;
                 }},
      value.data);
}

nlohmann::json to_json(const SchemaLayout& schema) {
  return {{"variant", std::string(variant_name(schema.variant))},
          {"devices", schema.devices},
          {"num_ops", schema.num_ops},
          {"max_neighbors", schema.max_neighbors},
          {"node_options", schema.node_options},
          {"input_space", to_json(schema.input_space)},
          {"output_space", to_json(schema.output_space)}};
}

SchemaLayout schema_from_json(const nlohmann::json& doc) {
  try {
    SchemaLayout s;
    s.variant = parse_variant(doc.at("variant").get<std::string>());
    s.devices = doc.at("devices").get<std::vector<std::string>>();
    s.num_ops = doc.at("num_ops").get<std::size_t>();
    s.max_neighbors = doc.at("max_neighbors").get<int>();
    s.node_options = doc.at("node_options").get<std::vector<std::string>>();
    s.input_space = space_from_json(doc.at("input_space"));
    s.output_space = space_from_json(doc.at("output_space"));
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw LayoutError(std::string("malformed schema document: ") + e.what());
  }
}

}  // namespace rltask
