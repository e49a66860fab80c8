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


#include <doctest.h>

#include <cmath>
#include <vector>

#include "rltask/kernels.hpp"
#include "rltask/rng.hpp"

namespace {

using rltask::RngStream;
namespace k = rltask::kernels;

std::vector<double> random_vec(RngStream& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-2.0, 2.0);
  return v;
}

// Relative to the magnitude of the terms, since the vector path reorders sums.
void check_close(const std::vector<double>& a, const std::vector<double>& b,
                 double scale) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::abs(a[i] - b[i]) <= 1e-12 * scale);
  }
}

}  // namespace

TEST_CASE("scalar kernels match hand-computed values") {
  const k::KernelTable& s = k::scalar_table();
  const double a[] = {1, 2, 3};
  const double b[] = {4, 5, 6};
  CHECK(s.dot(a, b, 3) == 32.0);

  const double w[] = {1, 2, 3, 4, 5, 6};  // 2 x 3
  const double bias[] = {0.5, -0.5};
  double y[2];
  s.gemv(w, 2, 3, a, bias, y);
  CHECK(y[0] == 14.5);
  CHECK(y[1] == 31.5);

  double xg[3] = {0, 0, 0};
  const double g[] = {1, -1};
  s.gemv_t_acc(w, 2, 3, g, xg);
  CHECK(xg[0] == -3.0);
  CHECK(xg[1] == -3.0);
  CHECK(xg[2] == -3.0);

  double wg[6] = {};
  s.ger_acc(wg, 2, 3, g, a);
  CHECK(wg[0] == 1.0);
  CHECK(wg[5] == -3.0);

  double acc[3] = {1, 1, 1};
  s.axpy(2.0, a, acc, 3);
  CHECK(acc[2] == 7.0);
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  const k::KernelTable* v = k::avx2_table();
  if (v == nullptr) {
    MESSAGE("no AVX2 variant on this machine; skipped");
    return;
  }
  const k::KernelTable& s = k::scalar_table();
  RngStream rng(99);
  // Sizes straddle the 4-wide and 16-wide unrolled paths and their tails.
  for (std::size_t rows : {1u, 3u, 4u, 7u, 20u, 33u}) {
    for (std::size_t cols : {1u, 2u, 5u, 8u, 16u, 17u, 37u}) {
      const auto w = random_vec(rng, rows * cols);
      const auto x = random_vec(rng, cols);
      const auto g = random_vec(rng, rows);
      const auto bias = random_vec(rng, rows);
      const double scale = 4.0 * static_cast<double>(cols + rows);

      CHECK(std::abs(s.dot(w.data(), w.data(), cols) -
                     v->dot(w.data(), w.data(), cols)) <= 1e-12 * scale);

      std::vector<double> ys(rows), yv(rows);
      s.gemv(w.data(), rows, cols, x.data(), bias.data(), ys.data());
      v->gemv(w.data(), rows, cols, x.data(), bias.data(), yv.data());
      check_close(ys, yv, scale);
      s.gemv(w.data(), rows, cols, x.data(), nullptr, ys.data());
      v->gemv(w.data(), rows, cols, x.data(), nullptr, yv.data());
      check_close(ys, yv, scale);

      std::vector<double> xs(cols, 0.25), xv(cols, 0.25);
      s.gemv_t_acc(w.data(), rows, cols, g.data(), xs.data());
      v->gemv_t_acc(w.data(), rows, cols, g.data(), xv.data());
      check_close(xs, xv, scale);

      std::vector<double> ws(rows * cols, 1.0), wv(rows * cols, 1.0);
      s.ger_acc(ws.data(), rows, cols, g.data(), x.data());
      v->ger_acc(wv.data(), rows, cols, g.data(), x.data());
      check_close(ws, wv, scale);

      std::vector<double> as = g, av = g;
      s.axpy(-0.75, bias.data(), as.data(), rows);
      v->axpy(-0.75, bias.data(), av.data(), rows);
      check_close(as, av, scale);
    }
  }
}

TEST_CASE("dispatch can be pinned to scalar") {
  const k::Isa before = k::active_isa();
  CHECK(k::set_isa(k::Isa::kScalar));
  CHECK(k::active_isa() == k::Isa::kScalar);
  const std::vector<double> a = {1, 2}, b = {3, 4};
  CHECK(k::dot(a, b) == 11.0);
  k::set_isa(before);
  CHECK(k::isa_name(k::Isa::kAvx2) == "avx2");
}
