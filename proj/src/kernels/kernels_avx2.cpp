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

// Built with -mavx2 -mfma; only reached after a runtime CPU check.

#include "kernels_impl.hpp"

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

namespace ngpkit::kernels::avx2 {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Lane j of the result is all-ones when bit j of `nibble` is set.
inline __m256d nibble_mask(std::uint64_t nibble) {
  const __m256i bits = _mm256_set_epi64x(8, 4, 2, 1);
  const __m256i v = _mm256_and_si256(_mm256_set1_epi64x(static_cast<long long>(nibble)), bits);
  return _mm256_castsi256_pd(_mm256_cmpeq_epi64(v, bits));
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double masked_sum(const double* values, const std::uint64_t* mask, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const std::uint64_t byte = (mask[i >> 6] >> (i & 63)) & 0xFFu;
    acc0 = _mm256_add_pd(acc0, _mm256_and_pd(_mm256_loadu_pd(values + i), nibble_mask(byte & 0xF)));
    acc1 = _mm256_add_pd(acc1, _mm256_and_pd(_mm256_loadu_pd(values + i + 4), nibble_mask(byte >> 4)));
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    if ((mask[i >> 6] >> (i & 63)) & 1u) acc += values[i];
  }
  return acc;
}

void split_scale(double* lo, double* hi, std::size_t n, double w) {
  const __m256d vw = _mm256_set1_pd(w);
  const __m256d voff = _mm256_set1_pd(1.0 - w);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(lo + i);
    _mm256_storeu_pd(hi + i, _mm256_mul_pd(v, vw));
    _mm256_storeu_pd(lo + i, _mm256_mul_pd(v, voff));
  }
  const double off = 1.0 - w;
  for (; i < n; ++i) {
    hi[i] = lo[i] * w;
    lo[i] = lo[i] * off;
  }
}

void gather_triple_product(const double* ws, const double* wp, const double* wo,
                           const std::uint32_t* s, const std::uint32_t* p, const std::uint32_t* o,
                           double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m128i is = _mm_loadu_si128(reinterpret_cast<const __m128i*>(s + i));
    const __m128i ip = _mm_loadu_si128(reinterpret_cast<const __m128i*>(p + i));
    const __m128i io = _mm_loadu_si128(reinterpret_cast<const __m128i*>(o + i));
    const __m256d vs = _mm256_i32gather_pd(ws, is, 8);
    const __m256d vp = _mm256_i32gather_pd(wp, ip, 8);
    const __m256d vo = _mm256_i32gather_pd(wo, io, 8);
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_mul_pd(vp, vs), vo));
  }
  for (; i < n; ++i) out[i] = wp[p[i]] * ws[s[i]] * wo[o[i]];
}

}  // namespace
}  // namespace ngpkit::kernels::avx2

namespace ngpkit::kernels {

const KernelTable* avx2_table_compiled() noexcept {
  static const KernelTable table{Backend::Avx2,     avx2::dot,         avx2::axpy,
                                 avx2::masked_sum,  avx2::split_scale, avx2::gather_triple_product};
  return &table;
}

}  // namespace ngpkit::kernels

#else

namespace ngpkit::kernels {
const KernelTable* avx2_table_compiled() noexcept { return nullptr; }
}  // namespace ngpkit::kernels

#endif
