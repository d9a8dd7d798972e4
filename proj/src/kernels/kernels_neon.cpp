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

#if defined(__aarch64__) && defined(__ARM_NEON)

#include <arm_neon.h>

namespace ngpkit::kernels::neon {
namespace {

inline float64x2_t pair_mask(std::uint64_t two_bits) {
  const uint64x2_t bits = {1, 2};
  const uint64x2_t v = vandq_u64(vdupq_n_u64(two_bits), bits);
  return vreinterpretq_f64_u64(vceqq_u64(v, bits));
}

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double masked_sum(const double* values, const std::uint64_t* mask, std::size_t n) {
  float64x2_t facc0 = vdupq_n_f64(0.0);
  float64x2_t facc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const std::uint64_t nib = (mask[i >> 6] >> (i & 63)) & 0xFu;
    const float64x2_t m0 = pair_mask(nib & 0x3u);
    const float64x2_t m1 = pair_mask(nib >> 2);
    facc0 = vaddq_f64(facc0, vreinterpretq_f64_u64(vandq_u64(
                                 vreinterpretq_u64_f64(vld1q_f64(values + i)),
                                 vreinterpretq_u64_f64(m0))));
    facc1 = vaddq_f64(facc1, vreinterpretq_f64_u64(vandq_u64(
                                 vreinterpretq_u64_f64(vld1q_f64(values + i + 2)),
                                 vreinterpretq_u64_f64(m1))));
  }
  double acc = vaddvq_f64(vaddq_f64(facc0, facc1));
  for (; i < n; ++i) {
    if ((mask[i >> 6] >> (i & 63)) & 1u) acc += values[i];
  }
  return acc;
}

void split_scale(double* lo, double* hi, std::size_t n, double w) {
  const float64x2_t vw = vdupq_n_f64(w);
  const double off = 1.0 - w;
  const float64x2_t voff = vdupq_n_f64(off);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vld1q_f64(lo + i);
    vst1q_f64(hi + i, vmulq_f64(v, vw));
    vst1q_f64(lo + i, vmulq_f64(v, voff));
  }
  for (; i < n; ++i) {
    hi[i] = lo[i] * w;
    lo[i] = lo[i] * off;
  }
}

// No gather instruction on NEON; lanes are filled with scalar loads.
void gather_triple_product(const double* ws, const double* wp, const double* wo,
                           const std::uint32_t* s, const std::uint32_t* p, const std::uint32_t* o,
                           double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t vs = {ws[s[i]], ws[s[i + 1]]};
    const float64x2_t vp = {wp[p[i]], wp[p[i + 1]]};
    const float64x2_t vo = {wo[o[i]], wo[o[i + 1]]};
    vst1q_f64(out + i, vmulq_f64(vmulq_f64(vp, vs), vo));
  }
  for (; i < n; ++i) out[i] = wp[p[i]] * ws[s[i]] * wo[o[i]];
}

}  // namespace
}  // namespace ngpkit::kernels::neon

namespace ngpkit::kernels {

const KernelTable* neon_table_compiled() noexcept {
  static const KernelTable table{Backend::Neon,     neon::dot,         neon::axpy,
                                 neon::masked_sum,  neon::split_scale, neon::gather_triple_product};
  return &table;
}

}  // namespace ngpkit::kernels

#else

namespace ngpkit::kernels {
const KernelTable* neon_table_compiled() noexcept { return nullptr; }
}  // namespace ngpkit::kernels

#endif
