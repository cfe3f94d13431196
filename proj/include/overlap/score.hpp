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

#include <algorithm>
#include <cmath>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "overlap/bath.hpp"
#include "overlap/common.hpp"
#include "overlap/controls.hpp"
#include "overlap/operator_algebra.hpp"

namespace overlap {

enum class ScoreKind {
  kExpectation,
  kPurity,
  kLinearEntropy,
  kFidelity,
  kGateError,
};

const char* score_kind_name(ScoreKind kind);
ScoreKind parse_score_kind(const std::string& name);

struct ScoreExtras {
  Operator observable;  // expectation
  double k = 0.0;       // linear entropy; 0 selects d/(d-1)
  Eigen::VectorXcd psi; // fidelity
};

/// rho0 = diag(p, 1-p) in the ordering (|1>, |0>).
Operator mixture_state(double p);

/// Throws kValidation unless rho is Hermitian, unit trace and PSD.
void validate_state(const Operator& rho, const Tolerances& tol = default_tolerances());

/// expectation -> Q, purity -> 2 rho0, linear entropy -> -2k rho0,
/// fidelity -> |psi><psi|.
Operator gradient_operator(ScoreKind kind, const Operator& rho0,
                           const ScoreExtras& extra = {});

struct ScoreSpec {
  ScoreKind kind = ScoreKind::kPurity;
  Operator rho0;
  Operator p_hat;
  bool commuting = true;
};

/// Validated spec. For fidelity an empty rho0 is replaced by |psi><psi|;
/// gate error needs only the dimension (rho0 may be any valid state).
ScoreSpec make_score_spec(ScoreKind kind, const Operator& rho0,
                          const ScoreExtras& extra = {},
                          const Tolerances& tol = default_tolerances());

/// Gamma_kj = Tr(rho0 [S_j, P] S_k).
ComplexMatrix gamma_matrix(const Operator& rho0, const Operator& p_hat,
                           const OperatorBasis& basis);

/// Haar-averaged Gamma for the fidelity score: -(d/(d+1)) I.
ComplexMatrix averaged_gamma(int d);

/// Gamma for a spec (averaged Gamma for gate error).
ComplexMatrix spec_gamma(const ScoreSpec& spec, const OperatorBasis& basis);

/// Unitary V whose columns are eigenvectors of P, and the rotated pair
/// (V^dagger rho0 V, V^dagger P V). Not applied implicitly anywhere.
struct Prerotation {
  Operator v;
  Operator rho0;
  Operator p_hat;
};
Prerotation prerotate(const Operator& rho0, const Operator& p_hat);

/// Q = sum_ij W_ij Tr[eps_i^T K_{i-j} eps_j Gamma] over a uniform time grid.
///
/// kFull: K_m = Phi(m h), W = c c^T (trapezoid c); the commuting score is
/// Re Q. kCausal: K_m = Phi(m h) for m > 0, Phi(0)/2 at m = 0, zero below;
/// the general score is 2 Re Q. Full evaluation runs through the Toeplitz
/// kernel; `delta` updates a cached base path in O(|S| L n^3).
class QuadraticOverlap {
 public:
  enum class Mode { kFull, kCausal };

  QuadraticOverlap(const CorrelationPath& corr, const TimeGrid& grid,
                   ComplexMatrix gamma, Mode mode);

  cplx evaluate(const std::vector<RealMatrix>& eps) const;

  void set_base(const std::vector<RealMatrix>& eps);
  cplx base_value() const { return base_; }
  /// Q(eps + d) - Q(eps) where d is nonzero only at sample indices idx.
  cplx delta(const std::vector<std::size_t>& idx,
             const std::vector<RealMatrix>& d) const;

  /// 1 (full) or 2 (causal).
  double multiplier() const { return mode_ == Mode::kCausal ? 2.0 : 1.0; }
  Mode mode() const { return mode_; }
  std::size_t length() const { return len_; }
  const ComplexMatrix& gamma() const { return gamma_; }

 private:
  const ComplexMatrix& lag(std::ptrdiff_t m) const {
    return k_[static_cast<std::size_t>(m + static_cast<std::ptrdiff_t>(len_) - 1)];
  }
  // y_i = sum_j K'_{i-j} c_j eps_j; transpose_kernel uses K'_m = K_{-m}^T.
  std::vector<ComplexMatrix> convolve(const std::vector<RealMatrix>& eps,
                                      bool transpose_kernel) const;

  Mode mode_;
  std::size_t len_ = 0;
  Eigen::Index n_ = 0;
  std::vector<double> c_;
  std::vector<ComplexMatrix> k_;
  ComplexMatrix gamma_;
  std::vector<bool> active_;  // kernel entry (a, b) not identically zero
  std::vector<std::vector<double>> h_re_, h_im_, ht_re_, ht_im_;
  std::vector<RealMatrix> base_eps_;
  std::vector<ComplexMatrix> a_, bt_;
  cplx base_{0.0};
};

/// Commuting-case score P from the time-domain double quadrature. The
/// correlation step must equal the rotation-path step. Throws kValidation
/// when |Im| exceeds tol.imaginary_residue relative to the score scale.
double score_timedomain(const RotationPath& rot, const CorrelationPath& corr,
                        const ComplexMatrix& gamma,
                        const Tolerances& tol = default_tolerances());

/// P = sum_k w_k Tr[eps_t Gamma eps_t^dagger G] = t int Tr[F_t G].
double score_spectral(const SystemSpectrum& sys, const BathModel& bath,
                      const ComplexMatrix& gamma,
                      const Tolerances& tol = default_tolerances());

/// F_t(w) = (1/t) eps_t Gamma eps_t^dagger.
std::vector<ComplexMatrix> system_spectral_matrix(const SystemSpectrum& sys,
                                                  const ComplexMatrix& gamma);

/// Gate error (d/(d+1)) int Tr[eps_t eps_t^dagger G]. Throws kValidation on a
/// non-PSD bath.
double gate_error(const SystemSpectrum& sys, const BathModel& bath, int d,
                  const Tolerances& tol = default_tolerances());
double gate_error_timedomain(const RotationPath& rot, const CorrelationPath& corr,
                             int d, const Tolerances& tol = default_tolerances());

/// Haar average of <psi|A|psi><psi|B|psi>: (Tr AB + Tr A Tr B)/(d(d+1)).
cplx haar_average_pair(const Operator& a, const Operator& b);

/// Haar-random pure state (normalized complex Gaussian vector).
Eigen::VectorXcd haar_state(int d, std::mt19937_64& rng);

struct ScoreBounds {
  double lo = 0.0;  // -P2
  double hi = 0.0;  // P1
  bool contains(double p, double slack = 1e-12) const {
    const double pad = slack * std::max({1.0, std::abs(lo), std::abs(hi)});
    return p >= lo - pad && p <= hi + pad;
  }
};

/// P_i = t sup Tr G Tr Gamma_i from the PSD split of the Hermitian part of
/// Gamma.
ScoreBounds score_bounds(const ComplexMatrix& gamma, const BathModel& bath, double t,
                         const Tolerances& tol = default_tolerances());

/// General (non-commuting) score from the ordered double quadrature.
double score_noncommuting(const RotationPath& rot, const CorrelationPath& corr,
                          const ComplexMatrix& gamma);
/// Spectral variant 2 Re sum_k w_k Tr[eps_t Gamma eps_t^dagger Gc(w_k)] with
/// the causal spectrum Gc on the same grid.
double score_noncommuting_spectral(const SystemSpectrum& sys,
                                   const std::vector<ComplexMatrix>& causal,
                                   const ComplexMatrix& gamma);

struct ScoreReport {
  double p_time = 0.0;
  double p_spectral = 0.0;
  double p_tilde = 0.0;
  double bound_lo = 0.0;
  double bound_hi = 0.0;
  bool has_gate_error = false;
  double gate_error = 0.0;
  bool commuting = true;
  double t = 0.0;
  std::size_t time_steps = 0;
  std::size_t omega_points = 0;
  double omega_cutoff = 0.0;
  double omega_step = 0.0;
  double kappa = 1.0;
};

/// Flat JSON object; keys as in the struct.
void write_score_report(std::ostream& out, const ScoreReport& report);

}  // namespace overlap
