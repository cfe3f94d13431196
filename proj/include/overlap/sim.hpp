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
#include <string>
#include <vector>

#include "overlap/bath.hpp"
#include "overlap/controls.hpp"
#include "overlap/operator_algebra.hpp"

namespace overlap {

// Simulators work directly on operators S_j(tau) = U^dagger S_j U and never
// touch the rotation-matrix / overlap machinery of the score module.

enum class SimMethod { kDyson2, kTcl2, kNz2 };
const char* sim_method_name(SimMethod method);

struct SimResult {
  SimMethod method = SimMethod::kDyson2;
  TimeGrid grid;
  std::vector<Operator> rho;  // Schroedinger picture, one per grid point
  std::vector<double> linear_entropy;
  double k = 2.0;
};

/// Tr(P Delta rho(t)) from the ordered second-order Dyson term. `path` holds
/// U on `grid`; corr.dt must equal the grid step.
double dyson2_score(const Operator& rho0, const Operator& p_hat,
                    const std::vector<Operator>& path, const TimeGrid& grid,
                    const OperatorBasis& couplings, const CorrelationPath& corr);

/// Interaction-picture Delta rho(tau_l) for every grid point.
std::vector<Operator> dyson2_state_change(const Operator& rho0,
                                          const std::vector<Operator>& path,
                                          const TimeGrid& grid,
                                          const OperatorBasis& couplings,
                                          const CorrelationPath& corr);

/// rho(tau) = U (rho0 + Delta rho) U^dagger; S_L linearized in Delta rho so
/// that Delta S_L equals the second-order score of P = -2k rho0.
SimResult dyson2_trace(const Operator& rho0, const std::vector<Operator>& path,
                       const TimeGrid& grid, const OperatorBasis& couplings,
                       const CorrelationPath& corr, double k = 0.0);

struct MasterOptions {
  std::size_t steps = 0;       // RK4 steps over [0, t]
  double memory_window = 0.0;  // NZ2 only; 0 keeps the full memory
  double max_step_rotation = 0.1;
  double k = 0.0;              // linear-entropy prefactor; 0 selects d/(d-1)
};

/// Fixed-step RK4 in the interaction picture. `half_path` holds U on the
/// half-step grid (2 steps + 1 points over [0, t]); corr.dt must equal half
/// a step. Throws kResolution when max ||U(tau+h) U(tau)^dagger - 1|| > 0.1.
SimResult tcl2_integrate(const Operator& rho0, const std::vector<Operator>& half_path,
                         const OperatorBasis& couplings, const CorrelationPath& corr,
                         double t, const MasterOptions& options);
SimResult nz2_integrate(const Operator& rho0, const std::vector<Operator>& half_path,
                        const OperatorBasis& couplings, const CorrelationPath& corr,
                        double t, const MasterOptions& options);

/// <0|rho|0> with |0> the last basis state.
std::vector<double> ground_overlap_trace(const SimResult& result);

void write_sim_csv(std::ostream& out, const SimResult& result);

}  // namespace overlap
