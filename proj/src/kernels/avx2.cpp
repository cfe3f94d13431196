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

// Compiled with -mavx2 -mfma. Only reached through the dispatch table after
// a CPU feature check, so nothing here may be inlined into other TUs.

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "kernels/impl.hpp"

namespace overlap::kernels::detail {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

// Four output frequencies per register; all series share the phase chain.
void phase_sum_avx2(const PhaseSum& p) {
  std::vector<double> xr, xi;
  transpose_input(p, xr, xi);
  std::vector<double> acc(8 * p.series);

  for (std::size_t m0 = 0; m0 < p.outputs; m0 += 4) {
    alignas(32) double nu[4] = {0.0, 0.0, 0.0, 0.0};
    alignas(32) double rr[4];
    alignas(32) double ri[4];
    const std::size_t lanes = (p.outputs - m0) < 4 ? (p.outputs - m0) : 4;
    for (std::size_t l = 0; l < lanes; ++l) nu[l] = p.nu[m0 + l];
    for (std::size_t l = 0; l < 4; ++l) {
      rr[l] = std::cos(nu[l] * p.spacing);
      ri[l] = std::sin(nu[l] * p.spacing);
    }
    const __m256d vrr = _mm256_load_pd(rr);
    const __m256d vri = _mm256_load_pd(ri);
    std::fill(acc.begin(), acc.end(), 0.0);
    __m256d zr = _mm256_set1_pd(1.0);
    __m256d zi = _mm256_setzero_pd();

    for (std::size_t n = 0; n < p.length; ++n) {
      if (n % kReseedInterval == 0) {
        alignas(32) double cr[4];
        alignas(32) double ci[4];
        for (std::size_t l = 0; l < 4; ++l) {
          const double phase =
              nu[l] * (p.origin + static_cast<double>(n) * p.spacing);
          cr[l] = std::cos(phase);
          ci[l] = std::sin(phase);
        }
        zr = _mm256_load_pd(cr);
        zi = _mm256_load_pd(ci);
      }
      const double* a = &xr[n * p.series];
      const double* b = &xi[n * p.series];
      for (std::size_t s = 0; s < p.series; ++s) {
        const __m256d va = _mm256_set1_pd(a[s]);
        const __m256d vb = _mm256_set1_pd(b[s]);
        __m256d re = _mm256_loadu_pd(&acc[8 * s]);
        __m256d im = _mm256_loadu_pd(&acc[8 * s + 4]);
        re = _mm256_fmadd_pd(va, zr, re);
        re = _mm256_fnmadd_pd(vb, zi, re);
        im = _mm256_fmadd_pd(va, zi, im);
        im = _mm256_fmadd_pd(vb, zr, im);
        _mm256_storeu_pd(&acc[8 * s], re);
        _mm256_storeu_pd(&acc[8 * s + 4], im);
      }
      const __m256d next = _mm256_fmsub_pd(zr, vrr, _mm256_mul_pd(zi, vri));
      zi = _mm256_fmadd_pd(zr, vri, _mm256_mul_pd(zi, vrr));
      zr = next;
    }

    for (std::size_t s = 0; s < p.series; ++s) {
      const double* re = &acc[8 * s];
      const double* im = &acc[8 * s + 4];
      for (std::size_t l = 0; l < lanes; ++l) {
        p.y_re[s * p.outputs + m0 + l] = re[l];
        p.y_im[s * p.outputs + m0 + l] = im[l];
      }
    }
  }
}

// Reversing h turns the lag walk into a contiguous dot product over j.
void toeplitz_avx2(const Toeplitz& p) {
  const std::size_t len = p.length;
  const std::size_t taps = 2 * len - 1;
  std::vector<double> hr(taps), hi(taps);
  for (std::size_t k = 0; k < taps; ++k) {
    hr[k] = p.h_re[taps - 1 - k];
    hi[k] = p.h_im[taps - 1 - k];
  }
  const std::size_t vec_end = len - len % 4;

  for (std::size_t s = 0; s < p.series; ++s) {
    const double* x = p.x + s * len;
    double* yr = p.y_re + s * len;
    double* yi = p.y_im + s * len;
    for (std::size_t i = 0; i < len; ++i) {
      const double* ar = hr.data() + (len - 1 - i);
      const double* ai = hi.data() + (len - 1 - i);
      __m256d sr = _mm256_setzero_pd();
      __m256d si = _mm256_setzero_pd();
      std::size_t j = 0;
      for (; j < vec_end; j += 4) {
        const __m256d vx = _mm256_loadu_pd(x + j);
        sr = _mm256_fmadd_pd(_mm256_loadu_pd(ar + j), vx, sr);
        si = _mm256_fmadd_pd(_mm256_loadu_pd(ai + j), vx, si);
      }
      double tr = hsum(sr);
      double ti = hsum(si);
      for (; j < len; ++j) {
        tr += ar[j] * x[j];
        ti += ai[j] * x[j];
      }
      if (p.accumulate) {
        yr[i] += tr;
        yi[i] += ti;
      } else {
        yr[i] = tr;
        yi[i] = ti;
      }
    }
  }
}

}  // namespace overlap::kernels::detail
