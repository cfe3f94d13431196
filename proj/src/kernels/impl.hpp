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

#include <vector>

#include "overlap/kernels.hpp"

namespace overlap::kernels::detail {

// Series-interleaved copy of the phase-sum input: out[n * series + s].
void transpose_input(const PhaseSum& p, std::vector<double>& re,
                     std::vector<double>& im);

void phase_sum_scalar(const PhaseSum& p);
void toeplitz_scalar(const Toeplitz& p);

#if defined(OVERLAP_HAVE_AVX2)
void phase_sum_avx2(const PhaseSum& p);
void toeplitz_avx2(const Toeplitz& p);
#endif

}  // namespace overlap::kernels::detail
