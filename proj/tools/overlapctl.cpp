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

// overlapctl: command-line front end for declarative runs.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "overlap/common.hpp"
#include "overlap/scenario.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitValidation = 4;

int exit_code(overlap::ErrorCategory category) {
  switch (category) {
    case overlap::ErrorCategory::kConfig:
    case overlap::ErrorCategory::kInvalidArgument:
      return kExitConfig;
    case overlap::ErrorCategory::kValidation:
    case overlap::ErrorCategory::kResolution:
    case overlap::ErrorCategory::kDimension:
      return kExitValidation;
    case overlap::ErrorCategory::kRuntime:
      return kExitRuntime;
  }
  return kExitRuntime;
}

struct Options {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  bool has_seed = false;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", o.out, "artifact directory (overrides config output)");
  sub->add_option("--seed", o.seed, "RNG seed (overrides config seed)");
}

overlap::RunConfig prepare(const Options& o, CLI::App* sub) {
  overlap::RunConfig c = overlap::load_config(o.config);
  if (sub->count("--seed") > 0) c.seed = o.seed;
  return c;
}

std::filesystem::path out_dir(const Options& o, const overlap::RunConfig& c) {
  if (!o.out.empty()) return o.out;
  if (!c.output.empty()) {
    const std::filesystem::path p(c.output);
    return p.is_absolute() ? p : c.base_dir / p;
  }
  overlap::fail(overlap::ErrorCategory::kConfig, "output: give --out or set \"output\"");
}

void report(const overlap::RunOutcome& r, const std::filesystem::path& dir) {
  std::cout << overlap::task_name(r.task) << ": " << r.status;
  if (r.task != overlap::Task::kDdCompare) std::cout << " score=" << r.score << " E=" << r.energy;
  std::cout << '\n';
  for (const auto& s : r.sims) {
    std::cout << "  " << overlap::sim_method_name(s.method) << " steps=" << s.steps
              << " dS_L=" << s.delta_entropy << '\n';
  }
  std::cout << "artifacts: " << dir.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bath-aware control optimization, scoring and validation"};
  app.require_subcommand(1);
  Options o;

  CLI::App* optimize = app.add_subcommand("optimize", "optimize controls for the config task");
  CLI::App* score = app.add_subcommand("score", "score the initial trajectory");
  CLI::App* dd = app.add_subcommand("ddcompare", "PDD vs UDD spectra");
  CLI::App* simulate = app.add_subcommand("simulate", "run the master-equation integrators");
  CLI::App* sweep = app.add_subcommand("sweep", "repeat the config task over sweep.values");
  for (CLI::App* sub : {optimize, score, dd, simulate, sweep}) add_common(sub, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    overlap::RunConfig c = prepare(o, sub);
    const std::filesystem::path dir = out_dir(o, c);
    if (sub == sweep) {
      const auto rows = overlap::run_sweep(c, dir);
      std::size_t failed = 0;
      for (const auto& r : rows) {
        if (!r.ok) {
          ++failed;
          std::cerr << "sweep value " << r.value << " failed: " << r.error << '\n';
        }
      }
      std::cout << "sweep: " << rows.size() - failed << "/" << rows.size()
                << " values ok\nartifacts: " << dir.string() << '\n';
      return 0;
    }
    if (sub == optimize) {
      if (c.task != overlap::Task::kGateProtect && c.task != overlap::Task::kCool &&
          c.task != overlap::Task::kHeat) {
        overlap::fail(overlap::ErrorCategory::kConfig,
                      "task: optimize needs gate_protect, cool or heat");
      }
    } else if (sub == score) {
      c.task = overlap::Task::kScoreOnly;
    } else if (sub == dd) {
      c.task = overlap::Task::kDdCompare;
    } else if (sub == simulate) {
      c.task = overlap::Task::kSimulate;
    }
    report(overlap::run(c, dir), dir);
    return 0;
  } catch (const overlap::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
