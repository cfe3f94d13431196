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

#include "overlap/bath.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "overlap/csv.hpp"
#include "overlap/kernels.hpp"
#include "overlap/operator_algebra.hpp"

namespace overlap {

namespace {

bool all_diagonal(const std::vector<ComplexMatrix>& mats) {
  for (const auto& m : mats) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (r != c && m(r, c) != cplx(0.0)) return false;
      }
    }
  }
  return true;
}

// out[m] = sum_n weights[n] * mats[n] * exp(i nu[m] (origin + n spacing)),
// entrywise, through the dispatched phase-sum kernel.
std::vector<ComplexMatrix> matrix_phase_sum(
    const std::vector<ComplexMatrix>& mats, const std::vector<double>& weights,
    const std::vector<double>& nu, double origin, double spacing) {
  const std::size_t len = mats.size();
  const auto n = mats.empty() ? Eigen::Index{0} : mats.front().rows();
  const bool diagonal = all_diagonal(mats);

  std::vector<std::pair<Eigen::Index, Eigen::Index>> entries;
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      if (!diagonal || r == c) entries.emplace_back(r, c);
    }
  }
  const std::size_t series = entries.size();
  std::vector<double> xr(series * len), xi(series * len);
  for (std::size_t s = 0; s < series; ++s) {
    const auto [r, c] = entries[s];
    for (std::size_t k = 0; k < len; ++k) {
      const cplx v = weights[k] * mats[k](r, c);
      xr[s * len + k] = v.real();
      xi[s * len + k] = v.imag();
    }
  }
  std::vector<double> yr(series * nu.size()), yi(series * nu.size());
  kernels::PhaseSum args;
  args.series = series;
  args.length = len;
  args.x_re = xr.data();
  args.x_im = xi.data();
  args.outputs = nu.size();
  args.nu = nu.data();
  args.origin = origin;
  args.spacing = spacing;
  args.y_re = yr.data();
  args.y_im = yi.data();
  kernels::active_kernels().phase_sum(args);

  std::vector<ComplexMatrix> out(nu.size(), ComplexMatrix::Zero(n, n));
  for (std::size_t s = 0; s < series; ++s) {
    const auto [r, c] = entries[s];
    for (std::size_t m = 0; m < nu.size(); ++m) {
      out[m](r, c) = cplx(yr[s * nu.size() + m], yi[s * nu.size() + m]);
    }
  }
  return out;
}

void require_resolved(const BathModel& bath) {
  if (bath.feature_width > 0.0 &&
      bath.grid.step > bath.feature_width / 10.0 * (1.0 + 1e-12)) {
    fail(ErrorCategory::kResolution,
         "bath grid spacing " + csv::format(bath.grid.step) +
             " does not resolve feature width " +
             csv::format(bath.feature_width) + " (need spacing <= width/10)");
  }
}

}  // namespace

bool BathModel::is_diagonal() const { return all_diagonal(spectrum); }

double BathModel::sup_trace() const {
  double sup = 0.0;
  for (const auto& g : spectrum) sup = std::max(sup, g.trace().real());
  return sup;
}

BathModel make_lorentzian_bath(const LorentzianParams& p) {
  if (p.weight < 0.0 || p.tail_weight < 0.0 || p.width < 0.0 ||
      p.tail_width < 0.0 || p.kappa < 0.0) {
    fail(ErrorCategory::kInvalidArgument,
         "make_lorentzian_bath: weights, widths and kappa must be >= 0");
  }
  if ((p.weight > 0.0 && p.width == 0.0) ||
      (p.tail_weight > 0.0 && p.tail_width == 0.0)) {
    fail(ErrorCategory::kInvalidArgument,
         "make_lorentzian_bath: a weighted peak needs a positive width");
  }
  if (!(p.cutoff > p.center)) {
    fail(ErrorCategory::kInvalidArgument,
         "make_lorentzian_bath: cutoff must exceed the peak center");
  }
  if (p.channel_mask.empty()) {
    fail(ErrorCategory::kInvalidArgument,
         "make_lorentzian_bath: empty channel mask");
  }
  BathModel bath;
  bath.channels = p.channel_mask.size();
  bath.grid = FrequencyGrid::from_cutoff(p.cutoff, p.step);
  bath.kappa = p.kappa;
  double width = 0.0;
  if (p.weight > 0.0) width = p.width;
  if (p.tail_weight > 0.0) {
    width = width > 0.0 ? std::min(width, p.tail_width) : p.tail_width;
  }
  bath.feature_width = width;

  const auto n = static_cast<Eigen::Index>(bath.channels);
  bath.spectrum.reserve(bath.grid.size());
  for (std::size_t k = 0; k < bath.grid.size(); ++k) {
    const double w = bath.grid.omega(k);
    double value = 0.0;
    if (p.weight > 0.0) {
      const double d = w - p.center;
      value += p.weight * p.width * p.width / (d * d + p.width * p.width);
    }
    if (p.tail_weight > 0.0) {
      value += p.tail_weight * p.tail_width * p.tail_width /
               (w * w + p.tail_width * p.tail_width);
    }
    ComplexMatrix g = ComplexMatrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (p.channel_mask[static_cast<std::size_t>(j)]) g(j, j) = p.kappa * value;
    }
    bath.spectrum.push_back(std::move(g));
  }
  return bath;
}

CorrelationPath correlation_from_spectrum(const BathModel& bath, double dt) {
  require_resolved(bath);
  const FrequencyGrid& grid = bath.grid;
  if (dt <= 0.0) dt = kPi / grid.cutoff();
  const double window = grid.window();
  const auto half = static_cast<std::size_t>(std::floor(window / dt + 1e-9));
  if (half == 0) {
    fail(ErrorCategory::kResolution,
         "correlation_from_spectrum: time step exceeds the window");
  }
  std::vector<double> nu(2 * half + 1);
  for (std::size_t m = 0; m < nu.size(); ++m) {
    nu[m] = -(static_cast<double>(m) - static_cast<double>(half)) * dt;
  }
  std::vector<double> w = trapezoid_weights(grid.size(), grid.step);
  for (auto& x : w) x /= kTwoPi;

  CorrelationPath path;
  path.dt = dt;
  path.half = half;
  path.values = matrix_phase_sum(bath.spectrum, w, nu, grid.omega(0), grid.step);
  return path;
}

std::vector<ComplexMatrix> correlation_at(const BathModel& bath,
                                          const std::vector<double>& lags) {
  std::vector<double> nu(lags.size());
  for (std::size_t m = 0; m < lags.size(); ++m) nu[m] = -lags[m];
  std::vector<double> w = trapezoid_weights(bath.grid.size(), bath.grid.step);
  for (auto& x : w) x /= kTwoPi;
  return matrix_phase_sum(bath.spectrum, w, nu, bath.grid.omega(0),
                          bath.grid.step);
}

bool correlation_decays(const CorrelationPath& corr, double ratio) {
  if (corr.values.empty()) return true;
  const double at0 = max_abs(corr.at(0));
  const auto h = static_cast<std::ptrdiff_t>(corr.half);
  const double edge = std::max(max_abs(corr.at(h)), max_abs(corr.at(-h)));
  return edge <= ratio * at0;
}

std::vector<ComplexMatrix> causal_spectrum(const CorrelationPath& corr,
                                           const FrequencyGrid& grid) {
  if (!correlation_decays(corr)) {
    fail(ErrorCategory::kResolution,
         "causal_spectrum: correlation does not decay within the window");
  }
  std::vector<ComplexMatrix> half_line(corr.values.begin() +
                                           static_cast<std::ptrdiff_t>(corr.half),
                                       corr.values.end());
  const std::vector<double> w = trapezoid_weights(half_line.size(), corr.dt);
  std::vector<double> nu(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) nu[k] = grid.omega(k);
  return matrix_phase_sum(half_line, w, nu, 0.0, corr.dt);
}

PsdReport check_psd(const BathModel& bath, const Tolerances& tol) {
  PsdReport report;
  double scale = 0.0;
  for (const auto& g : bath.spectrum) scale = std::max(scale, max_abs(g));
  report.min_eigenvalue = bath.spectrum.empty() ? 0.0 : INFINITY;
  for (std::size_t k = 0; k < bath.spectrum.size(); ++k) {
    const double lo = min_eigenvalue(bath.spectrum[k]);
    report.min_eigenvalue = std::min(report.min_eigenvalue, lo);
    if (lo < -tol.psd * scale) {
      report.pass = false;
      report.offending_omegas.push_back(bath.grid.omega(k));
    }
  }
  return report;
}

void write_bath_csv(std::ostream& out, const BathModel& bath) {
  const auto n = static_cast<Eigen::Index>(bath.channels);
  const bool off = !bath.is_diagonal();
  std::vector<std::string> header{"omega"};
  for (Eigen::Index j = 0; j < n; ++j) {
    header.push_back("G_" + std::to_string(j + 1) + std::to_string(j + 1));
  }
  if (off) {
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index k = j + 1; k < n; ++k) {
        const std::string tag = std::to_string(j + 1) + std::to_string(k + 1);
        header.push_back("Re_" + tag);
        header.push_back("Im_" + tag);
      }
    }
  }
  csv::write_header(out, header);
  for (std::size_t m = 0; m < bath.grid.size(); ++m) {
    const ComplexMatrix& g = bath.spectrum[m];
    std::vector<double> row{bath.grid.omega(m)};
    for (Eigen::Index j = 0; j < n; ++j) row.push_back(g(j, j).real());
    if (off) {
      for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = j + 1; k < n; ++k) {
          row.push_back(g(j, k).real());
          row.push_back(g(j, k).imag());
        }
      }
    }
    csv::write_row(out, row);
  }
}

BathModel read_bath_csv(std::istream& in) {
  const csv::Table table = csv::read(in);
  const std::size_t omega_col = table.column("omega");
  std::size_t n = 0;
  while (table.has_column("G_" + std::to_string(n + 1) + std::to_string(n + 1))) {
    ++n;
  }
  if (n == 0) fail(ErrorCategory::kValidation, "bath csv: no G_jj columns");
  const std::size_t rows = table.rows.size();
  if (rows < 3 || rows % 2 == 0) {
    fail(ErrorCategory::kValidation,
         "bath csv: need an odd number (>= 3) of symmetric grid points");
  }
  BathModel bath;
  bath.channels = n;
  bath.grid.half = rows / 2;
  const double lo = table.rows.front()[omega_col];
  const double hi = table.rows.back()[omega_col];
  bath.grid.step = (hi - lo) / static_cast<double>(rows - 1);
  if (!(bath.grid.step > 0.0) ||
      std::abs(lo + hi) > 1e-9 * std::max(1.0, std::abs(hi))) {
    fail(ErrorCategory::kValidation, "bath csv: omega grid is not symmetric");
  }
  for (std::size_t m = 0; m < rows; ++m) {
    const double expect = bath.grid.omega(m);
    if (std::abs(table.rows[m][omega_col] - expect) > 1e-9 * bath.grid.step * rows) {
      fail(ErrorCategory::kValidation, "bath csv: omega grid is not uniform");
    }
  }
  const auto dim = static_cast<Eigen::Index>(n);
  for (const auto& row : table.rows) {
    ComplexMatrix g = ComplexMatrix::Zero(dim, dim);
    for (std::size_t j = 0; j < n; ++j) {
      const std::string tag = std::to_string(j + 1) + std::to_string(j + 1);
      g(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) =
          row[table.column("G_" + tag)];
    }
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        const std::string tag = std::to_string(j + 1) + std::to_string(k + 1);
        if (!table.has_column("Re_" + tag)) continue;
        const cplx v(row[table.column("Re_" + tag)], row[table.column("Im_" + tag)]);
        g(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = v;
        g(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = std::conj(v);
      }
    }
    bath.spectrum.push_back(std::move(g));
  }
  return bath;
}

}  // namespace overlap
