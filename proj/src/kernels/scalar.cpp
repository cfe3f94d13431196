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

#include <algorithm>
#include <cmath>
#include <vector>

#include "kernels/impl.hpp"

namespace overlap::kernels::detail {

void transpose_input(const PhaseSum& p, std::vector<double>& re,
                     std::vector<double>& im) {
  re.assign(p.length * p.series, 0.0);
  im.assign(p.length * p.series, 0.0);
  for (std::size_t s = 0; s < p.series; ++s) {
    for (std::size_t n = 0; n < p.length; ++n) {
      re[n * p.series + s] = p.x_re[s * p.length + n];
      if (p.x_im != nullptr) im[n * p.series + s] = p.x_im[s * p.length + n];
    }
  }
}

void phase_sum_scalar(const PhaseSum& p) {
  std::vector<double> xr, xi;
  transpose_input(p, xr, xi);
  std::vector<double> acc_re(p.series), acc_im(p.series);

  for (std::size_t m = 0; m < p.outputs; ++m) {
    const double nu = p.nu[m];
    const double rr = std::cos(nu * p.spacing);
    const double ri = std::sin(nu * p.spacing);
    std::fill(acc_re.begin(), acc_re.end(), 0.0);
    std::fill(acc_im.begin(), acc_im.end(), 0.0);
    double zr = 1.0;
    double zi = 0.0;
    for (std::size_t n = 0; n < p.length; ++n) {
      if (n % kReseedInterval == 0) {
        const double phase =
            nu * (p.origin + static_cast<double>(n) * p.spacing);
        zr = std::cos(phase);
        zi = std::sin(phase);
      }
      const double* a = &xr[n * p.series];
      const double* b = &xi[n * p.series];
      for (std::size_t s = 0; s < p.series; ++s) {
        acc_re[s] += a[s] * zr - b[s] * zi;
        acc_im[s] += a[s] * zi + b[s] * zr;
      }
      const double next = zr * rr - zi * ri;
      zi = zr * ri + zi * rr;
      zr = next;
    }
    for (std::size_t s = 0; s < p.series; ++s) {
      p.y_re[s * p.outputs + m] = acc_re[s];
      p.y_im[s * p.outputs + m] = acc_im[s];
    }
  }
}

void toeplitz_scalar(const Toeplitz& p) {
  const std::size_t len = p.length;
  for (std::size_t s = 0; s < p.series; ++s) {
    const double* x = p.x + s * len;
    double* yr = p.y_re + s * len;
    double* yi = p.y_im + s * len;
    for (std::size_t i = 0; i < len; ++i) {
      double sr = 0.0;
      double si = 0.0;
      const std::size_t base = i + len - 1;
      for (std::size_t j = 0; j < len; ++j) {
        sr += p.h_re[base - j] * x[j];
        si += p.h_im[base - j] * x[j];
      }
      if (p.accumulate) {
        yr[i] += sr;
        yi[i] += si;
      } else {
        yr[i] = sr;
        yi[i] = si;
      }
    }
  }
}

}  // namespace overlap::kernels::detail
