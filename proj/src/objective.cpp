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

#include "overlap/objective.hpp"

#include <cmath>

namespace overlap {

Vector finite_diff_gradient(const std::function<double(const Vector&)>& fn,
                            const Vector& x, double h, const std::vector<bool>& mask) {
  if (!(h > 0.0)) fail(ErrorCategory::kInvalidArgument, "finite_diff_gradient: h <= 0");
  if (mask.size() != static_cast<std::size_t>(x.size())) {
    fail(ErrorCategory::kDimension, "finite_diff_gradient: mask size mismatch");
  }
  Vector g = Vector::Zero(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!mask[static_cast<std::size_t>(i)]) continue;
    probe(i) = x(i) + h;
    const double up = fn(probe);
    probe(i) = x(i) - h;
    const double down = fn(probe);
    probe(i) = x(i);
    g(i) = (up - down) / (2.0 * h);
  }
  return g;
}

Vector TrajectoryObjective::gradient(const ControlTrajectory& traj, double h) {
  ControlTrajectory work = traj;
  return finite_diff_gradient(
      [&](const Vector& x) {
        work.assign(x);
        return value(work);
      },
      traj.flatten(), h, traj.free_mask());
}

double EnergyObjective::value(const ControlTrajectory& traj) {
  return control_energy(traj, kind_, h0_);
}

RealMatrix rotation_matrix(const Operator& u, const OperatorBasis& basis) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  const double inv_d = 1.0 / basis.dim;
  RealMatrix eps(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Operator moved = u.adjoint() * basis[static_cast<std::size_t>(j)] * u;
    for (Eigen::Index k = 0; k < n; ++k) {
      // Tr(A B) = sum_ab A_ab B_ba
      eps(j, k) = inv_d * moved.cwiseProduct(basis[static_cast<std::size_t>(k)].transpose())
                              .sum()
                              .real();
    }
  }
  return eps;
}

OverlapObjective::OverlapObjective(OperatorBasis basis, const CorrelationPath& corr,
                                   double t, std::size_t quad_steps, ComplexMatrix gamma,
                                   QuadraticOverlap::Mode mode, double factor)
    : basis_(std::move(basis)),
      grid_{t, quad_steps},
      overlap_(corr, grid_, std::move(gamma), mode),
      factor_(factor) {}

std::vector<RealMatrix> OverlapObjective::eps_path(const ControlTrajectory& traj) const {
  const std::vector<Operator> path = propagators(traj, grid_);
  std::vector<RealMatrix> eps;
  eps.reserve(path.size());
  for (const auto& u : path) eps.push_back(rotation_matrix(u, basis_));
  return eps;
}

double OverlapObjective::to_score(cplx q) const {
  return factor_ * overlap_.multiplier() * q.real();
}

void OverlapObjective::record(double score) {
  ++evaluations_;
  if (has_bounds_ && !bounds_.contains(score, 1e-9)) ++violations_;
}

void OverlapObjective::set_bounds(const ScoreBounds& bounds) {
  bounds_ = bounds;
  has_bounds_ = true;
}

double OverlapObjective::value(const ControlTrajectory& traj) {
  const double score = to_score(overlap_.evaluate(eps_path(traj)));
  record(score);
  return score;
}

Vector OverlapObjective::gradient(const ControlTrajectory& traj, double h) {
  if (traj.kind != Parametrization::kEuler) return TrajectoryObjective::gradient(traj, h);
  if (!(h > 0.0)) fail(ErrorCategory::kInvalidArgument, "gradient: h <= 0");

  std::vector<RealMatrix> eps = eps_path(traj);
  overlap_.set_base(eps);
  const double base = to_score(overlap_.base_value());
  record(base);

  const std::vector<bool> mask = traj.free_mask();
  const auto params = static_cast<Eigen::Index>(traj.params());
  const double knot = traj.grid().step();
  const double step = grid_.step();
  Vector g = Vector::Zero(traj.f.size());

  std::vector<std::size_t> idx;
  std::vector<double> hat;
  std::vector<RealMatrix> d_up, d_down;
  for (Eigen::Index k = 0; k < traj.f.rows(); ++k) {
    const double center = knot * static_cast<double>(k);
    idx.clear();
    hat.clear();
    const double lo = std::max(0.0, std::floor((center - knot) / step));
    const double hi = std::min(static_cast<double>(grid_.steps),
                               std::ceil((center + knot) / step));
    for (auto i = static_cast<std::size_t>(lo); i <= static_cast<std::size_t>(hi); ++i) {
      const double w = 1.0 - std::abs(grid_.at(i) - center) / knot;
      if (w > 0.0) {
        idx.push_back(i);
        hat.push_back(w);
      }
    }
    for (Eigen::Index p = 0; p < params; ++p) {
      const auto flat = static_cast<std::size_t>(k * params + p);
      if (!mask[flat]) continue;
      d_up.clear();
      d_down.clear();
      for (std::size_t s = 0; s < idx.size(); ++s) {
        Vector f = traj.sample(grid_.at(idx[s]));
        const double f0 = f(p);
        f(p) = f0 + h * hat[s];
        d_up.push_back(rotation_matrix(euler_unitary(f(0), f(1), f(2)), basis_) - eps[idx[s]]);
        f(p) = f0 - h * hat[s];
        d_down.push_back(rotation_matrix(euler_unitary(f(0), f(1), f(2)), basis_) -
                         eps[idx[s]]);
      }
      const double up = to_score(overlap_.delta(idx, d_up));
      const double down = to_score(overlap_.delta(idx, d_down));
      record(base + up);
      record(base + down);
      g(static_cast<Eigen::Index>(flat)) = (up - down) / (2.0 * h);
    }
  }
  return g;
}

}  // namespace overlap
