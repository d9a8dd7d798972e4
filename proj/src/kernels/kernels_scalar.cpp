// Copyright 2026 The ngpkit Authors
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

#include "kernels_impl.hpp"

namespace ngpkit::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double masked_sum(const double* values, const std::uint64_t* mask, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if ((mask[i >> 6] >> (i & 63)) & 1u) acc += values[i];
  }
  return acc;
}

void split_scale(double* lo, double* hi, std::size_t n, double w) {
  const double off = 1.0 - w;
  for (std::size_t i = 0; i < n; ++i) {
    hi[i] = lo[i] * w;
    lo[i] = lo[i] * off;
  }
}

void gather_triple_product(const double* ws, const double* wp, const double* wo,
                           const std::uint32_t* s, const std::uint32_t* p, const std::uint32_t* o,
                           double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = wp[p[i]] * ws[s[i]] * wo[o[i]];
}

}  // namespace ngpkit::kernels::scalar

namespace ngpkit::kernels {

const KernelTable& scalar_table() noexcept {
  static const KernelTable table{Backend::Scalar,       scalar::dot,         scalar::axpy,
                                 scalar::masked_sum,    scalar::split_scale,
                                 scalar::gather_triple_product};
  return table;
}

}  // namespace ngpkit::kernels
