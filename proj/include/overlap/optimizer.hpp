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

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "overlap/controls.hpp"
#include "overlap/objective.hpp"

namespace overlap {

enum class Direction { kMinimize, kMaximize };
enum class RunStatus { kConverged, kMaxIters, kStalled };

const char* run_status_name(RunStatus status);

struct OptimizerConfig {
  double step = 1e-2;       // epsilon
  double step_norm = 0.0;   // > 0: epsilon = step_norm / |dP_perp| at iter 0
  Direction direction = Direction::kMinimize;
  EnergyKind constraint = EnergyKind::kModulation;
  double target = 0.0;      // E0
  Operator h0;              // modulation reference
  std::size_t max_iters = 200;
  double grad_tol = 1e-10;  // |dP_perp|
  double el_tol = 0.0;      // > 0: also stop when |dP_perp| / |dP| <= el_tol
  double fd_step = 1e-5;
  std::size_t restarts = 0;
  std::uint64_t seed = 1;
  double drift_tol = 1e-3;
  std::size_t max_rejections = 20;
};

struct HistoryEntry {
  std::size_t iter = 0;
  double p = 0.0;
  double e = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
};

struct OptimizationRun {
  OptimizerConfig config;
  ControlTrajectory initial;
  ControlTrajectory final;
  std::vector<HistoryEntry> history;
  RunStatus status = RunStatus::kMaxIters;
  double score = 0.0;
  double energy = 0.0;
  double el_residual = 0.0;  // |dP - lambda dE| / |dP| at the last iterate
  std::string diagnostic;
};

struct Projection {
  Vector perp;
  double lambda = 0.0;
  bool degenerate = false;  // |dE| == 0
};

/// dP_perp = dP - (dP.dE / |dE|^2) dE.
Projection project_gradient(const Vector& dp, const Vector& de);

struct Restoration {
  ControlTrajectory traj;
  bool ok = false;
  double alpha = 1.0;
};

/// f' = f_ref + alpha (f - f_ref) with f_ref the zero-cost reference path,
/// alpha chosen so |E(f') - E0| <= rel_tol E0. ok = false when no alpha
/// brackets E0.
Restoration restore_constraint(const ControlTrajectory& f, double target,
                               EnergyKind kind, const Operator& h0,
                               double rel_tol = 1e-10);

/// Projected-gradient walk f <- restore(f +- eps dP_perp) with step halving
/// on rejection. + maximizes. Throws kRuntime on non-finite values.
OptimizationRun optimize(const OptimizerConfig& config, TrajectoryObjective& score,
                         const ControlTrajectory& f0);

/// Smooth random start: reference path plus low sine modes, restored to E0.
ControlTrajectory random_trajectory(const ControlTrajectory& like,
                                    const OptimizerConfig& config, std::mt19937_64& rng,
                                    std::size_t modes = 4);

/// Run from f0 and from config.restarts random starts; best final score wins.
OptimizationRun optimize_restarts(const OptimizerConfig& config,
                                  TrajectoryObjective& score, const ControlTrajectory& f0);

void write_history_csv(std::ostream& out, const OptimizationRun& run);

}  // namespace overlap
