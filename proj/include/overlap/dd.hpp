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

#include <iosfwd>
#include <vector>

#include "overlap/controls.hpp"
#include "overlap/grid.hpp"
#include "overlap/operator_algebra.hpp"

namespace overlap {

/// Ideal instantaneous pi-pulses about a fixed Pauli axis.
struct PulseSequence {
  std::size_t n = 0;
  double t = 0.0;
  std::vector<double> timings;
  int axis = 1;
};

/// tau_j = j t / (n + 1).
PulseSequence pdd_sequence(std::size_t n, double t, int axis = 1);
/// tau_j = t sin^2(pi j / (2n + 2)).
PulseSequence udd_sequence(std::size_t n, double t, int axis = 1);

/// Piecewise-constant eps(tau) sampled on `grid`: channels anticommuting
/// with the pulse axis flip sign after each pulse (pulses at tau_j act for
/// tau > tau_j). Qubit only.
RotationPath toggling_path(const PulseSequence& seq, const OperatorBasis& basis,
                           const TimeGrid& grid);

/// F(w) = (1/t) |eps_t,cc(w)|^2 for channel c (1-based Pauli index), with
/// the segment integrals evaluated exactly. Throws kResolution when the
/// grid does not reach 4 pi n / t.
std::vector<double> dd_spectrum(const PulseSequence& seq, const FrequencyGrid& grid,
                                int channel = 3);

/// Frequency of the largest F on w >= 0.
double main_peak(const FrequencyGrid& grid, const std::vector<double>& f);

/// Trapezoid integral of F over |w| <= cutoff.
double low_frequency_weight(const FrequencyGrid& grid, const std::vector<double>& f,
                            double cutoff);

/// `omega,F,F_norm` with F_norm = F / max F.
void write_dd_csv(std::ostream& out, const FrequencyGrid& grid,
                  const std::vector<double>& f);

}  // namespace overlap
