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

#include <cstddef>
#include <vector>

namespace overlap {

/// Uniform grid on [0, t] with `steps` intervals.
struct TimeGrid {
  double t = 0.0;
  std::size_t steps = 0;

  double step() const { return t / static_cast<double>(steps); }
  std::size_t points() const { return steps + 1; }
  double at(std::size_t i) const { return step() * static_cast<double>(i); }
};

/// Symmetric uniform grid omega_k = (k - half) * step, k = 0 .. 2*half.
struct FrequencyGrid {
  std::size_t half = 0;
  double step = 0.0;

  std::size_t size() const { return 2 * half + 1; }
  double omega(std::size_t k) const {
    return (static_cast<double>(k) - static_cast<double>(half)) * step;
  }
  double cutoff() const { return static_cast<double>(half) * step; }
  /// Window length T = pi / step of the dual time grid.
  double window() const;

  /// Grid with cutoff exactly `cutoff` and spacing no larger than `max_step`.
  static FrequencyGrid from_cutoff(double cutoff, double max_step);
};

/// Composite trapezoid weights for `points` samples spaced by `step`.
std::vector<double> trapezoid_weights(std::size_t points, double step);

}  // namespace overlap
