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

#ifndef RLTASK_ERROR_HPP_
#define RLTASK_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace rltask {

// Base of every error raised by the library. The CLI maps these to a
// structured message on stderr and exit code 1.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

class LayoutError : public Error {
 public:
  explicit LayoutError(const std::string& m) : Error("layout error", m) {}
};

class ConversionError : public Error {
 public:
  explicit ConversionError(const std::string& m)
      : Error("conversion error", m) {}
};

class StructureError : public Error {
 public:
  explicit StructureError(const std::string& m)
      : Error("structural error", m) {}
};

class SimulationError : public Error {
 public:
  explicit SimulationError(const std::string& m)
      : Error("simulation error", m) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& m) : Error("validation error", m) {}
};

class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& m) : Error("protocol error", m) {}
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& m) : Error("shape error", m) {}
};

}  // namespace rltask

#endif  // RLTASK_ERROR_HPP_
