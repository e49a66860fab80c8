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

// Dense double-precision kernels behind the policy networks.
//
// Every kernel has a portable scalar reference implementation and, on
// x86-64, an AVX2+FMA variant. The variant is picked once at first use from
// the CPU feature bits; setting RLTASK_FORCE_SCALAR=1 in the environment (or
// calling set_isa) pins the scalar path. Matrices are row-major.
//
// The vector variants reorder floating-point sums, so results agree with the
// scalar path to rounding, not bit-for-bit. Runs are reproducible for a fixed
// machine and ISA selection.

#ifndef RLTASK_KERNELS_HPP_
#define RLTASK_KERNELS_HPP_

#include <cstddef>
#include <span>
#include <string_view>

namespace rltask::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;
  // returns sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y = W x + bias (bias may be null); W is rows x cols
  void (*gemv)(const double* w, std::size_t rows, std::size_t cols,
               const double* x, const double* bias, double* y);
  // x_grad += W^T g
  void (*gemv_t_acc)(const double* w, std::size_t rows, std::size_t cols,
                     const double* g, double* x_grad);
  // w_grad += g x^T
  void (*ger_acc)(double* w_grad, std::size_t rows, std::size_t cols,
                  const double* g, const double* x);
  // y += alpha x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

const KernelTable& scalar_table();
// Null when the build has no AVX2 variant or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table();

const KernelTable& active();
Isa active_isa();
// Pins the dispatch. Requesting an unavailable ISA falls back to scalar and
// returns false.
bool set_isa(Isa isa);

// Span-level wrappers routed through active().
double dot(std::span<const double> a, std::span<const double> b);
void gemv(std::span<const double> w, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<const double> bias,
          std::span<double> y);
void gemv_t_acc(std::span<const double> w, std::size_t rows, std::size_t cols,
                std::span<const double> g, std::span<double> x_grad);
void ger_acc(std::span<double> w_grad, std::size_t rows, std::size_t cols,
             std::span<const double> g, std::span<const double> x);
void axpy(double alpha, std::span<const double> x, std::span<double> y);

namespace detail {
KernelTable make_scalar_table();
#if defined(RLTASK_HAVE_AVX2)
KernelTable make_avx2_table();
#endif
}  // namespace detail

}  // namespace rltask::kernels

#endif  // RLTASK_KERNELS_HPP_
