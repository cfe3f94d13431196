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

#include <array>
#include <iosfwd>
#include <vector>

#include "overlap/common.hpp"
#include "overlap/grid.hpp"
#include "overlap/operator_algebra.hpp"

namespace overlap {

enum class Parametrization {
  kEuler,        // d = 2, f = (f1, f2, f3), U = e^{-i f3 s3/2} e^{-i f2 s2/2} e^{-i f1 s3/2}
  kHamiltonian,  // any d, f = (w_1 .. w_{d^2-1}), H_S = sum_j w_j S_j
};

/// Piecewise-linear controls on N+1 uniform knots over [0, t].
struct ControlTrajectory {
  double t = 0.0;
  int dim = 2;
  Parametrization kind = Parametrization::kEuler;
  RealMatrix f;  // (N+1) x params
  bool pin_start = true;
  bool pin_end = false;

  std::size_t intervals() const { return static_cast<std::size_t>(f.rows()) - 1; }
  std::size_t params() const { return static_cast<std::size_t>(f.cols()); }
  TimeGrid grid() const { return {t, intervals()}; }

  Vector sample(double tau) const;
  /// Derivative on the segment containing tau (right segment at knots).
  Vector slope(double tau) const;

  /// Row-major flattening of f and the matching mask of optimizable entries.
  Vector flatten() const;
  void assign(const Vector& x);
  std::vector<bool> free_mask() const;

  /// All-zero controls; Euler for d = 2, Hamiltonian otherwise.
  static ControlTrajectory zeros(double t, std::size_t intervals, int dim = 2);
};

/// Free evolution under H0 = (w0/2) s3 in Euler form: f = (0, 0, w0 tau).
ControlTrajectory free_evolution(double t, std::size_t intervals, double w0);

Operator euler_unitary(double f1, double f2, double f3);

/// Bloch components h of H_S = sum_j h_j s_j for Euler controls.
std::array<double, 3> euler_hamiltonian(const Vector& f, const Vector& fdot);

/// U(tau_k) at the knots. Euler only.
std::vector<Operator> propagator_from_euler(const ControlTrajectory& traj);

/// U at the points of `samples` (which must span [0, traj.t]). Exact for
/// Euler controls; midpoint exponentials for Hamiltonian controls.
std::vector<Operator> propagators(const ControlTrajectory& traj,
                                  const TimeGrid& samples,
                                  std::size_t substeps = 2);

/// H_S(tau_k) = i dU/dtau U^dagger from a uniformly sampled path: central
/// differences inside, second-order one-sided at the ends, Hermitized.
std::vector<Operator> hamiltonian_from_propagator(const std::vector<Operator>& path,
                                                  double step);

/// Time-ordered product of exp(-i H_k dtau) with H averaged over each
/// interval.
Operator integrate_hamiltonian(const std::vector<Operator>& h, double step);

/// eps(tau) on a uniform grid.
struct RotationPath {
  TimeGrid grid;
  std::vector<RealMatrix> eps;
};

/// eps_jk = Tr(U^dagger S_j U S_k) / d. Throws kValidation on imaginary
/// residue or loss of orthogonality.
RotationPath rotation_path(const std::vector<Operator>& path, const TimeGrid& grid,
                           const OperatorBasis& basis,
                           const Tolerances& tol = default_tolerances());

/// eps_t(w) = (1/sqrt(2 pi)) sum_i c_i e^{i w tau_i} eps(tau_i), trapezoid c.
struct SystemSpectrum {
  FrequencyGrid grid;
  double t = 0.0;
  std::vector<ComplexMatrix> values;
};

SystemSpectrum system_spectrum(const RotationPath& rot, const FrequencyGrid& grid);

enum class EnergyKind { kSpeed, kModulation };

/// Control cost. `speed`: int sum_l fdot_l^2. `modulation`: (1/d) int
/// Tr(H_S - H0)^2 (traceless part of H0), closed form per segment.
double control_energy(const ControlTrajectory& traj, EnergyKind kind,
                      const Operator& h0 = Operator());

/// Zero-cost reference path sharing the trajectory's pinned endpoints:
/// zero (speed), free evolution under H0 (modulation), or the straight line
/// between pinned endpoint values.
ControlTrajectory reference_trajectory(const ControlTrajectory& traj,
                                       EnergyKind kind, const Operator& h0);

void write_trajectory_csv(std::ostream& out, const ControlTrajectory& traj);
/// Reads `tau,f_1,..,f_p`; knots must be uniform starting at 0.
ControlTrajectory read_trajectory_csv(std::istream& in, int dim = 2);

/// `omega` plus Re/Im columns of every matrix entry, row-major.
void write_spectrum_csv(std::ostream& out, const FrequencyGrid& grid,
                        const std::vector<ComplexMatrix>& values);

}  // namespace overlap
