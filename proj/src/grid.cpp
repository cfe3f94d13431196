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

#include "overlap/grid.hpp"

#include <cmath>

#include "overlap/common.hpp"

namespace overlap {

double FrequencyGrid::window() const { return kPi / step; }

FrequencyGrid FrequencyGrid::from_cutoff(double cutoff, double max_step) {
  if (!(cutoff > 0.0) || !(max_step > 0.0)) {
    fail(ErrorCategory::kInvalidArgument,
         "FrequencyGrid: cutoff and step must be positive");
  }
  FrequencyGrid grid;
  grid.half = static_cast<std::size_t>(std::ceil(cutoff / max_step - 1e-9));
  if (grid.half == 0) grid.half = 1;
  grid.step = cutoff / static_cast<double>(grid.half);
  return grid;
}

std::vector<double> trapezoid_weights(std::size_t points, double step) {
  std::vector<double> w(points, step);
  if (points == 0) return w;
  if (points == 1) {
    w[0] = 0.0;
    return w;
  }
  w.front() = 0.5 * step;
  w.back() = 0.5 * step;
  return w;
}

}  // namespace overlap
