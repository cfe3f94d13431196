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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "overlap/bath.hpp"
#include "overlap/controls.hpp"
#include "overlap/optimizer.hpp"
#include "overlap/score.hpp"
#include "overlap/sim.hpp"

namespace overlap {

// Declarative runs. The JSON schema is documented in docs/config.md.

enum class Task { kGateProtect, kCool, kHeat, kScoreOnly, kDdCompare, kSimulate };

const char* task_name(Task task);

struct BathConfig {
  double center = 2.0;
  double width = 0.5;
  double weight = 1.0;
  double tail_weight = 0.0;
  double tail_width = 1.0;
  double kappa = 1e-2;
  std::vector<bool> channels;  // empty: all channels
  std::string file;            // spectrum CSV; overrides the Lorentzian
};

struct ScoreConfig {
  std::optional<ScoreKind> kind;  // default from the task
  double p = 0.25;                // qubit mixture
  std::vector<double> populations;  // diagonal rho0 for d > 2
  double k = 0.0;
  std::vector<double> observable;  // diagonal of the observable
  std::vector<double> psi;         // real amplitudes of the target state
};

struct ConstraintConfig {
  EnergyKind kind = EnergyKind::kModulation;
  double energy = 0.0;
  std::optional<double> omega0;  // default 2 pi / t
};

struct ControlsConfig {
  std::optional<Parametrization> parametrization;  // Euler for d = 2
  bool pin_end = false;
  std::string initial;  // "", "free", "random" or a trajectory CSV path
};

struct SimConfig {
  std::vector<SimMethod> methods{SimMethod::kDyson2, SimMethod::kTcl2, SimMethod::kNz2};
  std::size_t steps = 0;  // 0: start at the quadrature grid, refine on demand
  double memory_window = 0.0;
};

struct DdConfig {
  std::vector<std::size_t> n{11, 19};
  double omega_cutoff = 0.0;  // 0: twice 4 pi n_max / t
  std::size_t omega_half = 4000;
  int channel = 3;
  int axis = 1;
};

struct SweepConfig {
  std::string parameter;  // p, energy or kappa
  std::vector<double> values;
};

struct RunConfig {
  Task task = Task::kCool;
  int dimension = 2;
  double t = 10.0;
  std::size_t knots = 40;           // control intervals N
  std::size_t quad_steps = 0;       // M; 0 selects 10 N
  std::size_t omega_half = 0;       // K; 0 selects the smallest resolving grid
  BathConfig bath;
  ScoreConfig score;
  ConstraintConfig constraint;
  ControlsConfig controls;
  OptimizerConfig optimizer;
  SimConfig sim;
  DdConfig dd;
  SweepConfig sweep;
  std::uint64_t seed = 1;
  std::string output;
  std::filesystem::path base_dir;  // relative file paths resolve here
};

/// Parses and validates; errors are kConfig with the offending field path.
RunConfig parse_config(const std::string& text,
                       const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Normalized JSON of every field that affects outputs.
std::string canonical_config(const RunConfig& config);
/// FNV-1a over the canonical config plus the contents of referenced files.
std::string config_hash(const RunConfig& config);

/// Everything derived from a config before any optimization.
struct Problem {
  OperatorBasis basis;
  BathModel bath;
  CorrelationPath corr;
  TimeGrid quadrature;
  ScoreSpec spec;
  ComplexMatrix gamma;
  Operator h0;
  double k = 2.0;
  double factor = 1.0;  // -1 turns the score into the gate error
};

Problem build_problem(const RunConfig& config);

/// Starting trajectory from controls.initial.
ControlTrajectory initial_trajectory(const RunConfig& config, const Problem& problem);

struct SimSummary {
  SimMethod method;
  std::size_t steps = 0;
  double delta_entropy = 0.0;
  double final_overlap = 0.0;
};

struct RunOutcome {
  Task task = Task::kCool;
  double score = 0.0;
  double energy = 0.0;
  std::string status;
  std::vector<SimSummary> sims;
  std::vector<std::string> files;
};

/// Executes the config's task and writes artifacts into `out`.
RunOutcome run(const RunConfig& config, const std::filesystem::path& out);

/// One run per sweep value in `out/<parameter>_<index>`, plus sweep.csv.
/// Failing values are recorded and the sweep continues.
struct SweepRow {
  double value = 0.0;
  bool ok = false;
  RunOutcome outcome;
  std::string error;
};
std::vector<SweepRow> run_sweep(const RunConfig& config, const std::filesystem::path& out);

/// Runs the simulators on a trajectory. Steps double from `steps` until the
/// step-size check passes.
std::vector<SimResult> simulate(const Problem& problem, const ControlTrajectory& traj,
                                const SimConfig& sim, const Operator& rho0);

}  // namespace overlap
