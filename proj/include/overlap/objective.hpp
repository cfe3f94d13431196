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

#include <functional>
#include <vector>

#include "overlap/bath.hpp"
#include "overlap/controls.hpp"
#include "overlap/score.hpp"

namespace overlap {

/// Central differences over entries with mask[i] true; others get 0.
Vector finite_diff_gradient(const std::function<double(const Vector&)>& fn,
                            const Vector& x, double h, const std::vector<bool>& mask);

/// Scalar functional of a control trajectory.
class TrajectoryObjective {
 public:
  virtual ~TrajectoryObjective() = default;
  virtual double value(const ControlTrajectory& traj) = 0;
  /// Central-difference gradient in the flattened layout; pinned entries 0.
  virtual Vector gradient(const ControlTrajectory& traj, double h);
};

class EnergyObjective : public TrajectoryObjective {
 public:
  EnergyObjective(EnergyKind kind, Operator h0) : kind_(kind), h0_(std::move(h0)) {}
  double value(const ControlTrajectory& traj) override;

 private:
  EnergyKind kind_;
  Operator h0_;
};

/// eps_jk = Tr(U^dagger S_j U S_k) / d without validation.
RealMatrix rotation_matrix(const Operator& u, const OperatorBasis& basis);

/// Second-order score of a trajectory: factor * multiplier * Re Q on a
/// quadrature grid of `quad_steps` intervals whose step matches the
/// correlation path.
///
/// For Euler controls the gradient perturbs one knot at a time and updates
/// Q through QuadraticOverlap::delta, touching only the samples inside the
/// two adjacent segments.
class OverlapObjective : public TrajectoryObjective {
 public:
  OverlapObjective(OperatorBasis basis, const CorrelationPath& corr, double t,
                   std::size_t quad_steps, ComplexMatrix gamma,
                   QuadraticOverlap::Mode mode, double factor = 1.0);

  double value(const ControlTrajectory& traj) override;
  Vector gradient(const ControlTrajectory& traj, double h) override;

  const TimeGrid& quadrature() const { return grid_; }
  std::vector<RealMatrix> eps_path(const ControlTrajectory& traj) const;

  /// Every value() is checked against these bounds once set.
  void set_bounds(const ScoreBounds& bounds);
  std::size_t evaluations() const { return evaluations_; }
  std::size_t bound_violations() const { return violations_; }

 private:
  double to_score(cplx q) const;
  void record(double score);

  OperatorBasis basis_;
  TimeGrid grid_;
  QuadraticOverlap overlap_;
  double factor_;
  bool has_bounds_ = false;
  ScoreBounds bounds_;
  std::size_t evaluations_ = 0;
  std::size_t violations_ = 0;
};

}  // namespace overlap
