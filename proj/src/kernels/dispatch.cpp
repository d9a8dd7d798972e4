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

#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels_impl.hpp"
#include "ngpkit/error.hpp"

namespace ngpkit::kernels {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* pick_default() noexcept {
  const char* env = std::getenv("NGPKIT_SIMD");
  const std::string choice = env ? env : "auto";
  if (choice == "scalar") return &scalar_table();
  if (choice == "avx2" || choice == "auto") {
    if (const auto* t = table_for(Backend::Avx2)) return t;
  }
  if (choice == "neon" || choice == "auto") {
    if (const auto* t = table_for(Backend::Neon)) return t;
  }
  return &scalar_table();
}

std::atomic<const KernelTable*>& slot() noexcept {
  static std::atomic<const KernelTable*> current{pick_default()};
  return current;
}

}  // namespace

std::string_view backend_name(Backend b) noexcept {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "?";
}

const KernelTable* table_for(Backend b) noexcept {
  switch (b) {
    case Backend::Scalar: return &scalar_table();
    case Backend::Avx2: return cpu_has_avx2() ? avx2_table_compiled() : nullptr;
    // Advanced SIMD is mandatory on AArch64, so compiled-in means usable.
    case Backend::Neon: return neon_table_compiled();
  }
  return nullptr;
}

bool backend_available(Backend b) noexcept { return table_for(b) != nullptr; }

Backend active_backend() noexcept { return active().backend; }

void set_backend(Backend b) {
  const auto* t = table_for(b);
  if (!t) throw ContractError("SIMD backend " + std::string(backend_name(b)) + " unavailable");
  slot().store(t, std::memory_order_release);
}

const KernelTable& active() noexcept { return *slot().load(std::memory_order_acquire); }

}  // namespace ngpkit::kernels
