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

#pragma once

// Data-parallel inner loops. Each kernel has a portable scalar reference
// and an AVX2/FMA variant; the variant is picked once at startup from the
// CPU feature flags and can be pinned with OVERLAP_KERNELS=scalar|avx2.
//
// Kernels take raw row-major buffers so that the SIMD translation unit
// does not instantiate any Eigen code.

#include <cstddef>

namespace overlap::kernels {

enum class Isa { kScalar, kAvx2 };

const char* isa_name(Isa isa);

/// Phases are recomputed exactly every kReseedInterval samples; between
/// reseeds they are advanced by complex multiplication.
inline constexpr std::size_t kReseedInterval = 64;

/// y[s][m] = sum_n x[s][n] * exp(i * nu[m] * (origin + n * spacing))
///
/// x is `series` x `length` (x_im may be null for real input); y is
/// `series` x `outputs` and is overwritten.
struct PhaseSum {
  std::size_t series = 0;
  std::size_t length = 0;
  const double* x_re = nullptr;
  const double* x_im = nullptr;
  std::size_t outputs = 0;
  const double* nu = nullptr;
  double origin = 0.0;
  double spacing = 0.0;
  double* y_re = nullptr;
  double* y_im = nullptr;
};

/// y[s][i] (+)= sum_j h[i - j + length - 1] * x[s][j],  i, j < length.
///
/// h holds 2*length-1 complex lag values (lag -(length-1) first); x is real.
struct Toeplitz {
  std::size_t length = 0;
  const double* h_re = nullptr;
  const double* h_im = nullptr;
  std::size_t series = 0;
  const double* x = nullptr;
  double* y_re = nullptr;
  double* y_im = nullptr;
  bool accumulate = false;
};

struct KernelTable {
  Isa isa;
  void (*phase_sum)(const PhaseSum&);
  void (*toeplitz)(const Toeplitz&);
};

const KernelTable& scalar_kernels();

/// nullptr when not compiled in or when the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

const KernelTable& active_kernels();

/// Pin the active table; throws overlap::Error if the ISA is unavailable.
void select_kernels(Isa isa);

}  // namespace overlap::kernels
