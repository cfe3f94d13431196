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

#include "overlap/dd.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "overlap/csv.hpp"

namespace overlap {

namespace {

void require_pulses(std::size_t n, double t, int axis) {
  if (n < 1) fail(ErrorCategory::kInvalidArgument, "dd: need at least one pulse");
  if (!(t > 0.0)) fail(ErrorCategory::kInvalidArgument, "dd: t must be positive");
  if (axis < 1 || axis > 3) fail(ErrorCategory::kInvalidArgument, "dd: axis must be 1..3");
}

std::size_t pulses_before(const PulseSequence& seq, double tau) {
  return static_cast<std::size_t>(
      std::lower_bound(seq.timings.begin(), seq.timings.end(), tau) -
      seq.timings.begin());
}

}  // namespace

PulseSequence pdd_sequence(std::size_t n, double t, int axis) {
  require_pulses(n, t, axis);
  PulseSequence seq{n, t, {}, axis};
  for (std::size_t j = 1; j <= n; ++j) {
    seq.timings.push_back(t * static_cast<double>(j) / static_cast<double>(n + 1));
  }
  return seq;
}

PulseSequence udd_sequence(std::size_t n, double t, int axis) {
  require_pulses(n, t, axis);
  PulseSequence seq{n, t, {}, axis};
  for (std::size_t j = 1; j <= n; ++j) {
    const double s = std::sin(kPi * static_cast<double>(j) / (2.0 * static_cast<double>(n) + 2.0));
    seq.timings.push_back(t * s * s);
  }
  return seq;
}

RotationPath toggling_path(const PulseSequence& seq, const OperatorBasis& basis,
                           const TimeGrid& grid) {
  if (basis.dim != 2) fail(ErrorCategory::kDimension, "toggling_path: qubit only");
  const Operator p = pauli(seq.axis);
  const auto n = static_cast<Eigen::Index>(basis.size());
  std::vector<bool> flips(basis.size());
  for (std::size_t j = 0; j < basis.size(); ++j) {
    flips[j] = max_abs(commutator(p, basis[j])) > 1e-12;
  }
  RotationPath rot;
  rot.grid = grid;
  for (std::size_t i = 0; i < grid.points(); ++i) {
    const bool odd = pulses_before(seq, grid.at(i)) % 2 == 1;
    RealMatrix eps = RealMatrix::Identity(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (odd && flips[static_cast<std::size_t>(j)]) eps(j, j) = -1.0;
    }
    rot.eps.push_back(std::move(eps));
  }
  return rot;
}

std::vector<double> dd_spectrum(const PulseSequence& seq, const FrequencyGrid& grid,
                                int channel) {
  if (grid.size() == 0) fail(ErrorCategory::kInvalidArgument, "dd_spectrum: empty grid");
  if (channel < 1 || channel > 3) {
    fail(ErrorCategory::kInvalidArgument, "dd_spectrum: channel must be 1..3");
  }
  if (grid.cutoff() < 4.0 * kPi * static_cast<double>(seq.n) / seq.t * (1.0 - 1e-12)) {
    fail(ErrorCategory::kResolution, "dd_spectrum: grid does not reach 4 pi n / t");
  }
  const bool toggles = channel != seq.axis;
  std::vector<double> edges{0.0};
  if (toggles) edges.insert(edges.end(), seq.timings.begin(), seq.timings.end());
  edges.push_back(seq.t);

  const cplx i(0.0, 1.0);
  std::vector<double> f(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double w = grid.omega(k);
    cplx e(0.0);
    double sign = 1.0;
    for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
      const double a = edges[s], b = edges[s + 1];
      // int_a^b e^{i w tau} dtau = e^{i w (a+b)/2} (b - a) sinc(w (b - a)/2)
      const double half = 0.5 * w * (b - a);
      const double sinc = std::abs(half) < 1e-8 ? 1.0 : std::sin(half) / half;
      e += sign * std::exp(i * (0.5 * w * (a + b))) * ((b - a) * sinc);
      sign = -sign;
    }
    f[k] = std::norm(e) / (kTwoPi * seq.t);
  }
  return f;
}

double main_peak(const FrequencyGrid& grid, const std::vector<double>& f) {
  double best = -1.0, at = 0.0;
  for (std::size_t k = grid.half; k < grid.size(); ++k) {
    if (f[k] > best) {
      best = f[k];
      at = grid.omega(k);
    }
  }
  return at;
}

double low_frequency_weight(const FrequencyGrid& grid, const std::vector<double>& f,
                            double cutoff) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double a = grid.omega(k), b = grid.omega(k + 1);
    if (std::abs(a) <= cutoff && std::abs(b) <= cutoff) total += 0.5 * (b - a) * (f[k] + f[k + 1]);
  }
  return total;
}

void write_dd_csv(std::ostream& out, const FrequencyGrid& grid,
                  const std::vector<double>& f) {
  const double peak = f.empty() ? 0.0 : *std::max_element(f.begin(), f.end());
  csv::write_header(out, {"omega", "F", "F_norm"});
  for (std::size_t k = 0; k < f.size(); ++k) {
    csv::write_row(out, {grid.omega(k), f[k], peak > 0.0 ? f[k] / peak : 0.0});
  }
}

}  // namespace overlap
