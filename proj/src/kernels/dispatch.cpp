/*
 * Copyright 2026 The overlap Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <atomic>
#include <cstdlib>
#include <string_view>

#include "kernels/impl.hpp"
#include "overlap/common.hpp"

namespace overlap::kernels {

namespace {

const KernelTable kScalarTable{Isa::kScalar, &detail::phase_sum_scalar,
                               &detail::toeplitz_scalar};

#if defined(OVERLAP_HAVE_AVX2)
const KernelTable kAvx2Table{Isa::kAvx2, &detail::phase_sum_avx2,
                             &detail::toeplitz_avx2};

bool cpu_has_avx2() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

const KernelTable* initial_table() {
  const KernelTable* best = avx2_kernels();
  if (const char* env = std::getenv("OVERLAP_KERNELS")) {
    const std::string_view want(env);
    if (want == "scalar") return &kScalarTable;
    if (want == "avx2" && best != nullptr) return best;
  }
  return best != nullptr ? best : &kScalarTable;
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{initial_table()};
  return slot;
}

}  // namespace

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

const KernelTable& scalar_kernels() { return kScalarTable; }

const KernelTable* avx2_kernels() {
#if defined(OVERLAP_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? &kAvx2Table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() { return *active_slot().load(); }

void select_kernels(Isa isa) {
  if (isa == Isa::kScalar) {
    active_slot().store(&kScalarTable);
    return;
  }
  const KernelTable* table = avx2_kernels();
  if (table == nullptr) {
    fail(ErrorCategory::kRuntime, "select_kernels: AVX2 kernels unavailable");
  }
  active_slot().store(table);
}

}  // namespace overlap::kernels
