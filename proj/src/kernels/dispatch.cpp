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

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "rltask/error.hpp"
#include "rltask/kernels.hpp"

namespace rltask::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(RLTASK_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* initial_table() {
  const char* force = std::getenv("RLTASK_FORCE_SCALAR");
  if (force != nullptr && std::strcmp(force, "0") != 0 && *force != '\0') {
    return &scalar_table();
  }
  const KernelTable* vec = avx2_table();
  return vec != nullptr ? vec : &scalar_table();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

void check_same(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw ShapeError(std::string(what) + ": length " + std::to_string(a) +
                     " != " + std::to_string(b));
  }
}

}  // namespace

std::string_view isa_name(Isa isa) {
  return isa == Isa::kAvx2 ? "avx2" : "scalar";
}

const KernelTable& scalar_table() {
  static const KernelTable table = detail::make_scalar_table();
  return table;
}

const KernelTable* avx2_table() {
#if defined(RLTASK_HAVE_AVX2)
  static const KernelTable table = detail::make_avx2_table();
  static const bool usable = cpu_has_avx2();
  return usable ? &table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

Isa active_isa() { return active().isa; }

bool set_isa(Isa isa) {
  if (isa == Isa::kAvx2) {
    if (const KernelTable* vec = avx2_table()) {
      current().store(vec);
      return true;
    }
    current().store(&scalar_table());
    return false;
  }
  current().store(&scalar_table());
  return true;
}

double dot(std::span<const double> a, std::span<const double> b) {
  check_same(a.size(), b.size(), "dot");
  return active().dot(a.data(), b.data(), a.size());
}

void gemv(std::span<const double> w, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<const double> bias,
          std::span<double> y) {
  check_same(w.size(), rows * cols, "gemv weights");
  check_same(x.size(), cols, "gemv input");
  check_same(y.size(), rows, "gemv output");
  if (!bias.empty()) check_same(bias.size(), rows, "gemv bias");
  active().gemv(w.data(), rows, cols, x.data(),
                bias.empty() ? nullptr : bias.data(), y.data());
}

void gemv_t_acc(std::span<const double> w, std::size_t rows, std::size_t cols,
                std::span<const double> g, std::span<double> x_grad) {
  check_same(w.size(), rows * cols, "gemv_t weights");
  check_same(g.size(), rows, "gemv_t upstream");
  check_same(x_grad.size(), cols, "gemv_t output");
  active().gemv_t_acc(w.data(), rows, cols, g.data(), x_grad.data());
}

void ger_acc(std::span<double> w_grad, std::size_t rows, std::size_t cols,
             std::span<const double> g, std::span<const double> x) {
  check_same(w_grad.size(), rows * cols, "ger weights");
  check_same(g.size(), rows, "ger rows");
  check_same(x.size(), cols, "ger cols");
  active().ger_acc(w_grad.data(), rows, cols, g.data(), x.data());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  check_same(x.size(), y.size(), "axpy");
  active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace rltask::kernels
