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

#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference version and
// optional AVX2 (x86-64) / NEON (AArch64) versions; the active table is picked
// once at startup from CPU features and the NGPKIT_SIMD environment variable
// (`scalar`, `avx2`, `neon`, `auto`).
//
// Bit-exactness across backends:
//   split_scale, gather_triple_product  identical results (products only)
//   dot, masked_sum                     reassociated sums, equal within rounding
//   axpy                                identical unless the backend fuses mul+add

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace ngpkit::kernels {

enum class Backend { Scalar, Avx2, Neon };

std::string_view backend_name(Backend b) noexcept;

struct KernelTable {
  Backend backend;
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// Sum of values[i] over the set bits of `mask` (bit i of word i/64).
  double (*masked_sum)(const double* values, const std::uint64_t* mask, std::size_t n);
  /// hi[i] = lo[i] * w, then lo[i] = lo[i] * (1 - w).
  void (*split_scale)(double* lo, double* hi, std::size_t n, double w);
  /// out[i] = wp[p[i]] * ws[s[i]] * wo[o[i]]
  void (*gather_triple_product)(const double* ws, const double* wp, const double* wo,
                                const std::uint32_t* s, const std::uint32_t* p,
                                const std::uint32_t* o, double* out, std::size_t n);
};

const KernelTable& scalar_table() noexcept;
/// nullptr when the backend is not compiled in or the CPU lacks it.
const KernelTable* table_for(Backend b) noexcept;

bool backend_available(Backend b) noexcept;
Backend active_backend() noexcept;
/// Switches the process-wide backend; throws ContractError if unavailable.
/// Intended for tests and benchmarks, not for use while kernels run.
void set_backend(Backend b);

const KernelTable& active() noexcept;

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
  return active().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept {
  active().axpy(alpha, x.data(), y.data(), x.size() < y.size() ? x.size() : y.size());
}

inline double masked_sum(std::span<const double> values, std::span<const std::uint64_t> mask) noexcept {
  return active().masked_sum(values.data(), mask.data(), values.size());
}

}  // namespace ngpkit::kernels
