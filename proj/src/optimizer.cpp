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

#include "overlap/optimizer.hpp"

#include <cmath>
#include <ostream>

#include "overlap/csv.hpp"

namespace overlap {

namespace {

double energy_of(const ControlTrajectory& f, EnergyKind kind, const Operator& h0) {
  return control_energy(f, kind, h0);
}

bool within(double e, double target, double rel) {
  return std::abs(e - target) <= rel * std::max(target, 1e-300);
}

}  // namespace

const char* run_status_name(RunStatus status) {
  switch (status) {
    case RunStatus::kConverged:
      return "converged";
    case RunStatus::kMaxIters:
      return "max_iters";
    case RunStatus::kStalled:
      return "stalled";
  }
  return "unknown";
}

Projection project_gradient(const Vector& dp, const Vector& de) {
  if (dp.size() != de.size()) fail(ErrorCategory::kDimension, "project_gradient: size mismatch");
  Projection out;
  const double ee = de.squaredNorm();
  if (ee == 0.0) {
    out.perp = dp;
    out.degenerate = true;
    return out;
  }
  out.lambda = dp.dot(de) / ee;
  out.perp = dp - out.lambda * de;
  // One re-orthogonalization pass removes the residual left by cancellation.
  out.perp -= (out.perp.dot(de) / ee) * de;
  return out;
}

Restoration restore_constraint(const ControlTrajectory& f, double target, EnergyKind kind,
                               const Operator& h0, double rel_tol) {
  Restoration out{f, false, 1.0};
  if (!(target >= 0.0)) fail(ErrorCategory::kInvalidArgument, "restore_constraint: E0 < 0");
  const double e = energy_of(f, kind, h0);
  if (within(e, target, rel_tol)) {
    out.ok = true;
    return out;
  }
  const ControlTrajectory ref = reference_trajectory(f, kind, h0);
  const double e_ref = energy_of(ref, kind, h0);
  if (target < e_ref * (1.0 - 1e-12)) return out;
  if (target <= e_ref * (1.0 + 1e-12) || target == 0.0) {
    out.traj = ref;
    out.alpha = 0.0;
    out.ok = within(e_ref, target, rel_tol) || target == e_ref;
    return out;
  }
  const RealMatrix dir = f.f - ref.f;
  if (dir.cwiseAbs().maxCoeff() == 0.0) return out;

  ControlTrajectory trial = f;
  auto excess = [&](double alpha) {
    trial.f = ref.f + alpha * dir;
    return energy_of(trial, kind, h0) - target;
  };

  double alpha;
  if (kind == EnergyKind::kSpeed) {
    // E(ref + a d) = E_ref + a^2 E(d) exactly: the reference is constant or
    // linear between pinned ends, where d vanishes.
    alpha = std::sqrt((target - e_ref) / (e - e_ref));
  } else {
    // E is not monotone in alpha (cos f2 coupling), so bracket the root
    // nearest to alpha = 1 by widening a window around it.
    const double g1 = excess(1.0);
    double lo = 1.0, hi = 1.0;
    bool bracketed = false;
    for (double w = 1e-6; w < 1e12 && !bracketed; w *= 2.0) {
      const double down = std::max(1.0 - w, 0.0);
      if ((excess(down) < 0.0) != (g1 < 0.0)) {
        lo = down;
        bracketed = true;
      } else if ((excess(1.0 + w) < 0.0) != (g1 < 0.0)) {
        hi = 1.0 + w;
        bracketed = true;
      }
    }
    if (!bracketed) return out;
    double g_lo = excess(lo);
    alpha = 0.5 * (lo + hi);
    for (int k = 0; k < 200; ++k) {
      alpha = 0.5 * (lo + hi);
      const double g = excess(alpha);
      if (std::abs(g) <= rel_tol * target || std::abs(hi - lo) <= 1e-16 * std::abs(hi)) break;
      if ((g < 0.0) == (g_lo < 0.0)) {
        lo = alpha;
        g_lo = g;
      } else {
        hi = alpha;
      }
    }
  }
  excess(alpha);
  out.traj = trial;
  out.alpha = alpha;
  out.ok = within(energy_of(trial, kind, h0), target, std::max(rel_tol, 1e-9));
  return out;
}

OptimizationRun optimize(const OptimizerConfig& config, TrajectoryObjective& score,
                         const ControlTrajectory& f0) {
  if (!(config.step > 0.0) || !(config.fd_step > 0.0) || !(config.drift_tol > 0.0) ||
      config.grad_tol < 0.0) {
    fail(ErrorCategory::kInvalidArgument, "optimize: step, fd_step and tolerances must be > 0");
  }
  EnergyObjective energy(config.constraint, config.h0);
  OptimizationRun run;
  run.config = config;
  run.initial = f0;

  const Restoration start = restore_constraint(f0, config.target, config.constraint, config.h0);
  if (!start.ok) {
    run.final = f0;
    run.status = RunStatus::kStalled;
    run.diagnostic = "initial trajectory cannot be restored to the constraint";
    return run;
  }
  ControlTrajectory f = start.traj;
  double p = score.value(f);
  double e = energy.value(f);
  if (!std::isfinite(p) || !std::isfinite(e)) {
    fail(ErrorCategory::kRuntime, "optimize: non-finite score or constraint at start");
  }

  const double sign = config.direction == Direction::kMaximize ? 1.0 : -1.0;
  double base_step = config.step;
  double eps = base_step;
  for (std::size_t iter = 0;; ++iter) {
    const Vector dp = score.gradient(f, config.fd_step);
    const Vector de = energy.gradient(f, config.fd_step);
    const Projection proj = project_gradient(dp, de);
    const double gn = proj.perp.norm();
    const double dn = dp.norm();
    run.el_residual = dn > 0.0 ? gn / dn : 0.0;
    if (iter == 0 && config.step_norm > 0.0 && gn > 0.0) {
      base_step = config.step_norm / gn;
      eps = base_step;
    }
    run.history.push_back({iter, p, e, gn, eps});
    if (!std::isfinite(gn)) fail(ErrorCategory::kRuntime, "optimize: non-finite gradient");
    if (gn <= config.grad_tol || (config.el_tol > 0.0 && run.el_residual <= config.el_tol)) {
      run.status = RunStatus::kConverged;
      break;
    }
    if (iter >= config.max_iters) {
      run.status = RunStatus::kMaxIters;
      break;
    }

    bool accepted = false;
    for (std::size_t rejected = 0; rejected < config.max_rejections; ++rejected) {
      ControlTrajectory trial = f;
      trial.assign(f.flatten() + sign * eps * proj.perp);
      const Restoration r =
          restore_constraint(trial, config.target, config.constraint, config.h0);
      if (r.ok) {
        const double pt = score.value(r.traj);
        const double et = energy.value(r.traj);
        if (!std::isfinite(pt) || !std::isfinite(et)) {
          fail(ErrorCategory::kRuntime, "optimize: non-finite score or constraint");
        }
        if (sign * (pt - p) > 0.0 &&
            std::abs(et - config.target) <= config.drift_tol * std::max(config.target, 1.0)) {
          f = r.traj;
          p = pt;
          e = et;
          eps = base_step;
          accepted = true;
          break;
        }
      }
      eps *= 0.5;
    }
    if (!accepted) {
      run.status = RunStatus::kStalled;
      run.diagnostic = "no improving step after " + std::to_string(config.max_rejections) +
                       " halvings";
      break;
    }
  }
  run.final = f;
  run.score = p;
  run.energy = e;
  return run;
}

ControlTrajectory random_trajectory(const ControlTrajectory& like,
                                    const OptimizerConfig& config, std::mt19937_64& rng,
                                    std::size_t modes) {
  const ControlTrajectory ref = reference_trajectory(like, config.constraint, config.h0);
  std::normal_distribution<double> normal;
  ControlTrajectory f = ref;
  const TimeGrid grid = like.grid();
  // Sine modes vanish at 0 (and at t when the end is pinned).
  const double shift = like.pin_end ? 0.0 : 0.5;
  for (Eigen::Index c = 0; c < f.f.cols(); ++c) {
    for (std::size_t m = 1; m <= modes; ++m) {
      const double amp = normal(rng) / static_cast<double>(m);
      const double wave = kPi * (static_cast<double>(m) - shift) / like.t;
      for (Eigen::Index k = 0; k < f.f.rows(); ++k) {
        f.f(k, c) += amp * std::sin(wave * grid.at(static_cast<std::size_t>(k)));
      }
    }
  }
  if (!like.pin_start) {
    for (Eigen::Index c = 0; c < f.f.cols(); ++c) f.f(0, c) += normal(rng);
  }
  const Restoration r = restore_constraint(f, config.target, config.constraint, config.h0);
  return r.ok ? r.traj : ref;
}

OptimizationRun optimize_restarts(const OptimizerConfig& config, TrajectoryObjective& score,
                                  const ControlTrajectory& f0) {
  std::mt19937_64 rng(config.seed);
  OptimizationRun best = optimize(config, score, f0);
  const double sign = config.direction == Direction::kMaximize ? 1.0 : -1.0;
  for (std::size_t r = 0; r < config.restarts; ++r) {
    const ControlTrajectory start = random_trajectory(f0, config, rng);
    OptimizationRun run = optimize(config, score, start);
    if (sign * (run.score - best.score) > 0.0) best = std::move(run);
  }
  return best;
}

void write_history_csv(std::ostream& out, const OptimizationRun& run) {
  csv::write_header(out, {"iter", "P", "E", "grad_norm", "step"});
  for (const auto& h : run.history) {
    csv::write_row(out, {static_cast<double>(h.iter), h.p, h.e, h.grad_norm, h.step});
  }
}

}  // namespace overlap
