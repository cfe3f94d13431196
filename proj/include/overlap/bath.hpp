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

#include "overlap/common.hpp"
#include "overlap/grid.hpp"

namespace overlap {

/// Bath coupling spectra G(omega) on a symmetric uniform grid.
///
/// `spectrum[k]` is the Hermitian positive semi-definite channel matrix at
/// grid.omega(k) with the coupling strength already applied; `kappa` is
/// kept for reporting results in units of the coupling strength.
struct BathModel {
  std::size_t channels = 0;
  FrequencyGrid grid;
  std::vector<ComplexMatrix> spectrum;
  double kappa = 1.0;
  /// Narrowest spectral feature width, 0 when unknown (imported spectra).
  double feature_width = 0.0;

  bool is_diagonal() const;
  /// sup over the grid of Tr G(omega).
  double sup_trace() const;
};

struct LorentzianParams {
  double center = 0.0;       // omega_c
  double width = 1.0;        // gamma
  double weight = 1.0;       // a
  double tail_weight = 0.0;  // b
  double tail_width = 1.0;   // gamma_b
  double cutoff = 10.0;      // Omega
  double step = 0.1;         // requested maximum grid spacing
  double kappa = 1.0;
  std::vector<bool> channel_mask{true, true, true};
};

/// G_jj(w) = kappa [a g^2/((w - w_c)^2 + g^2) + b g_b^2/(w^2 + g_b^2)] on
/// masked channels, zero elsewhere.
BathModel make_lorentzian_bath(const LorentzianParams& params);

/// Bath correlation matrices Phi(s) on lags s = m * dt, m = -half .. half.
struct CorrelationPath {
  double dt = 0.0;
  std::size_t half = 0;
  std::vector<ComplexMatrix> values;

  double window() const { return dt * static_cast<double>(half); }
  const ComplexMatrix& at(std::ptrdiff_t m) const {
    return values[static_cast<std::size_t>(m + static_cast<std::ptrdiff_t>(half))];
  }
  std::size_t channels() const {
    return values.empty() ? 0 : static_cast<std::size_t>(values.front().rows());
  }
};

/// Phi(s) = (1/2pi) sum_k w_k exp(-i omega_k s) G(omega_k), trapezoid
/// weights w_k, on the window [-pi/domega, pi/domega].
///
/// dt = 0 selects the Nyquist step pi/Omega. Throws kResolution when the
/// grid does not resolve the narrowest feature (domega > width/10).
CorrelationPath correlation_from_spectrum(const BathModel& bath,
                                          double dt = 0.0);

/// Phi evaluated at arbitrary lags by the same discrete transform.
std::vector<ComplexMatrix> correlation_at(const BathModel& bath,
                                          const std::vector<double>& lags);

/// True when |Phi(+-T)| <= ratio * |Phi(0)|.
bool correlation_decays(const CorrelationPath& corr,
                        double ratio = default_tolerances().window_decay);

/// Half-line transform sum_{m >= 0} h_m exp(i omega s_m) Phi(s_m) with
/// trapezoid weights over [0, T]. Throws kResolution when Phi does not
/// decay within the window.
std::vector<ComplexMatrix> causal_spectrum(const CorrelationPath& corr,
                                           const FrequencyGrid& grid);

struct PsdReport {
  bool pass = true;
  double min_eigenvalue = 0.0;
  std::vector<double> offending_omegas;
};

PsdReport check_psd(const BathModel& bath,
                    const Tolerances& tol = default_tolerances());

/// CSV with header `omega,G_11,...,G_nn` followed by `Re_jk,Im_jk` pairs
/// (j < k) when any off-diagonal entry is nonzero.
void write_bath_csv(std::ostream& out, const BathModel& bath);
BathModel read_bath_csv(std::istream& in);

}  // namespace overlap
