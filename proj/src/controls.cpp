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

#include "overlap/controls.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "overlap/csv.hpp"
#include "overlap/kernels.hpp"

namespace overlap {

namespace {

std::size_t segment_of(const ControlTrajectory& traj, double tau) {
  const std::size_t n = traj.intervals();
  const double pos = tau / traj.grid().step();
  if (!(pos > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(pos), n - 1);
}

void require_shape(const ControlTrajectory& traj) {
  if (traj.f.rows() < 2 || traj.f.cols() < 1 || !(traj.t > 0.0)) {
    fail(ErrorCategory::kInvalidArgument,
         "ControlTrajectory: need t > 0, at least two knots and one parameter");
  }
  if (traj.kind == Parametrization::kEuler && (traj.dim != 2 || traj.f.cols() != 3)) {
    fail(ErrorCategory::kDimension,
         "ControlTrajectory: Euler controls need d = 2 and three angles");
  }
  if (traj.kind == Parametrization::kHamiltonian &&
      traj.f.cols() != traj.dim * traj.dim - 1) {
    fail(ErrorCategory::kDimension,
         "ControlTrajectory: Hamiltonian controls need d^2 - 1 components");
  }
}

/// Bloch vector of the traceless part of a qubit operator.
std::array<double, 3> bloch(const Operator& h) {
  std::array<double, 3> v{};
  for (int j = 1; j <= 3; ++j) v[j - 1] = 0.5 * (h * pauli(j)).trace().real();
  return v;
}

// sin(x)/x, stable near zero.
double sinc(double x) {
  return std::abs(x) < 1e-6 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
}

}  // namespace

Vector ControlTrajectory::sample(double tau) const {
  const std::size_t k = segment_of(*this, tau);
  const double s = tau / grid().step() - static_cast<double>(k);
  const auto r = static_cast<Eigen::Index>(k);
  return (f.row(r) + s * (f.row(r + 1) - f.row(r))).transpose();
}

Vector ControlTrajectory::slope(double tau) const {
  const auto r = static_cast<Eigen::Index>(segment_of(*this, tau));
  return ((f.row(r + 1) - f.row(r)) / grid().step()).transpose();
}

Vector ControlTrajectory::flatten() const {
  Vector x(f.size());
  for (Eigen::Index r = 0; r < f.rows(); ++r) {
    for (Eigen::Index c = 0; c < f.cols(); ++c) x(r * f.cols() + c) = f(r, c);
  }
  return x;
}

void ControlTrajectory::assign(const Vector& x) {
  if (x.size() != f.size()) {
    fail(ErrorCategory::kDimension, "ControlTrajectory::assign: size mismatch");
  }
  for (Eigen::Index r = 0; r < f.rows(); ++r) {
    for (Eigen::Index c = 0; c < f.cols(); ++c) f(r, c) = x(r * f.cols() + c);
  }
}

std::vector<bool> ControlTrajectory::free_mask() const {
  std::vector<bool> mask(static_cast<std::size_t>(f.size()), true);
  const auto p = static_cast<std::size_t>(f.cols());
  const auto last = static_cast<std::size_t>(f.rows()) - 1;
  for (std::size_t c = 0; c < p; ++c) {
    if (pin_start) mask[c] = false;
    if (pin_end) mask[last * p + c] = false;
  }
  return mask;
}

ControlTrajectory ControlTrajectory::zeros(double t, std::size_t intervals, int dim) {
  if (intervals < 1) {
    fail(ErrorCategory::kInvalidArgument, "ControlTrajectory: need >= 1 interval");
  }
  ControlTrajectory traj;
  traj.t = t;
  traj.dim = dim;
  const auto rows = static_cast<Eigen::Index>(intervals + 1);
  if (dim == 2) {
    traj.kind = Parametrization::kEuler;
    traj.f = RealMatrix::Zero(rows, 3);
    traj.pin_start = true;
  } else {
    traj.kind = Parametrization::kHamiltonian;
    traj.f = RealMatrix::Zero(rows, dim * dim - 1);
    traj.pin_start = false;
  }
  require_shape(traj);
  return traj;
}

ControlTrajectory free_evolution(double t, std::size_t intervals, double w0) {
  ControlTrajectory traj = ControlTrajectory::zeros(t, intervals, 2);
  for (Eigen::Index k = 0; k < traj.f.rows(); ++k) {
    traj.f(k, 2) = w0 * traj.grid().at(static_cast<std::size_t>(k));
  }
  return traj;
}

Operator euler_unitary(double f1, double f2, double f3) {
  // Closed-form ZYZ product.
  const cplx i(0.0, 1.0);
  const double c = std::cos(0.5 * f2);
  const double s = std::sin(0.5 * f2);
  const cplx a = std::exp(-0.5 * i * (f1 + f3));
  const cplx b = std::exp(-0.5 * i * (f3 - f1));
  Operator u(2, 2);
  u(0, 0) = a * c;
  u(0, 1) = -b * s;
  u(1, 0) = std::conj(b) * s;
  u(1, 1) = std::conj(a) * c;
  return u;
}

std::array<double, 3> euler_hamiltonian(const Vector& f, const Vector& fdot) {
  const double s2 = std::sin(f(1)), c2 = std::cos(f(1));
  const double s3 = std::sin(f(2)), c3 = std::cos(f(2));
  return {0.5 * (fdot(0) * s2 * c3 - fdot(1) * s3),
          0.5 * (fdot(0) * s2 * s3 + fdot(1) * c3),
          0.5 * (fdot(0) * c2 + fdot(2))};
}

std::vector<Operator> propagator_from_euler(const ControlTrajectory& traj) {
  require_shape(traj);
  if (traj.kind != Parametrization::kEuler) {
    fail(ErrorCategory::kDimension,
         "propagator_from_euler: trajectory is not Euler-parametrized");
  }
  std::vector<Operator> path;
  path.reserve(static_cast<std::size_t>(traj.f.rows()));
  for (Eigen::Index k = 0; k < traj.f.rows(); ++k) {
    path.push_back(euler_unitary(traj.f(k, 0), traj.f(k, 1), traj.f(k, 2)));
  }
  return path;
}

std::vector<Operator> propagators(const ControlTrajectory& traj,
                                  const TimeGrid& samples, std::size_t substeps) {
  require_shape(traj);
  if (samples.steps < 1 || std::abs(samples.t - traj.t) > 1e-12 * traj.t) {
    fail(ErrorCategory::kInvalidArgument, "propagators: samples must span [0, t]");
  }
  std::vector<Operator> path;
  path.reserve(samples.points());
  if (traj.kind == Parametrization::kEuler) {
    for (std::size_t i = 0; i < samples.points(); ++i) {
      const Vector f = traj.sample(samples.at(i));
      path.push_back(euler_unitary(f(0), f(1), f(2)));
    }
    return path;
  }

  const OperatorBasis basis = generate_basis(traj.dim);
  const double knot = traj.grid().step();
  substeps = std::max<std::size_t>(substeps, 1);
  auto hamiltonian = [&](double tau) {
    const Vector w = traj.sample(tau);
    Operator h = Operator::Zero(traj.dim, traj.dim);
    for (std::size_t j = 0; j < basis.size(); ++j) {
      h += w(static_cast<Eigen::Index>(j)) * basis[j];
    }
    return h;
  };
  Operator u = Operator::Identity(traj.dim, traj.dim);
  path.push_back(u);
  for (std::size_t i = 0; i + 1 < samples.points(); ++i) {
    const double a = samples.at(i);
    const double b = samples.at(i + 1);
    std::vector<double> cuts{a};
    for (double k = std::floor(a / knot) + 1.0; k * knot < b - 1e-12 * knot; k += 1.0) {
      cuts.push_back(k * knot);
    }
    cuts.push_back(b);
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const double len = (cuts[c + 1] - cuts[c]) / static_cast<double>(substeps);
      for (std::size_t s = 0; s < substeps; ++s) {
        const double mid = cuts[c] + (static_cast<double>(s) + 0.5) * len;
        u = unitary_exponential(hamiltonian(mid), len) * u;
      }
    }
    path.push_back(u);
  }
  return path;
}

std::vector<Operator> hamiltonian_from_propagator(const std::vector<Operator>& path,
                                                  double step) {
  const std::size_t n = path.size();
  if (n < 2) {
    fail(ErrorCategory::kInvalidArgument,
         "hamiltonian_from_propagator: need at least two points");
  }
  const cplx i(0.0, 1.0);
  std::vector<Operator> h(n);
  for (std::size_t k = 0; k < n; ++k) {
    Operator du;
    if (n == 2) {
      du = (path[1] - path[0]) / step;
    } else if (k == 0) {
      du = (-3.0 * path[0] + 4.0 * path[1] - path[2]) / (2.0 * step);
    } else if (k == n - 1) {
      du = (3.0 * path[k] - 4.0 * path[k - 1] + path[k - 2]) / (2.0 * step);
    } else {
      du = (path[k + 1] - path[k - 1]) / (2.0 * step);
    }
    const Operator raw = i * du * path[k].adjoint();
    h[k] = 0.5 * (raw + raw.adjoint());
  }
  return h;
}

Operator integrate_hamiltonian(const std::vector<Operator>& h, double step) {
  if (h.empty()) fail(ErrorCategory::kInvalidArgument, "integrate_hamiltonian: empty");
  Operator u = Operator::Identity(h.front().rows(), h.front().cols());
  for (std::size_t k = 0; k + 1 < h.size(); ++k) {
    u = unitary_exponential(0.5 * (h[k] + h[k + 1]), step) * u;
  }
  return u;
}

RotationPath rotation_path(const std::vector<Operator>& path, const TimeGrid& grid,
                           const OperatorBasis& basis, const Tolerances& tol) {
  if (path.size() != grid.points()) {
    fail(ErrorCategory::kDimension, "rotation_path: path/grid size mismatch");
  }
  const std::size_t n = basis.size();
  const auto nn = static_cast<Eigen::Index>(n);
  const double inv_d = 1.0 / basis.dim;
  RotationPath rot;
  rot.grid = grid;
  rot.eps.reserve(path.size());
  std::vector<Operator> moved(n);
  for (std::size_t k = 0; k < path.size(); ++k) {
    const Operator& u = path[k];
    if (u.rows() != basis.dim) {
      fail(ErrorCategory::kDimension, "rotation_path: operator/basis mismatch");
    }
    for (std::size_t j = 0; j < n; ++j) moved[j] = u.adjoint() * basis[j] * u;
    RealMatrix eps(nn, nn);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t l = 0; l < n; ++l) {
        const cplx v = (moved[j] * basis[l]).trace() * inv_d;
        if (std::abs(v.imag()) > tol.rotation_imaginary) {
          fail(ErrorCategory::kValidation,
               "rotation_path: imaginary residue " + csv::format(v.imag()) +
                   " at knot " + std::to_string(k));
        }
        eps(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) = v.real();
      }
    }
    const double defect =
        (eps.transpose() * eps - RealMatrix::Identity(nn, nn)).cwiseAbs().maxCoeff();
    if (defect > tol.orthogonality) {
      fail(ErrorCategory::kValidation, "rotation_path: eps not orthogonal at knot " +
                                           std::to_string(k) + " (defect " +
                                           csv::format(defect) + ")");
    }
    rot.eps.push_back(std::move(eps));
  }
  return rot;
}

SystemSpectrum system_spectrum(const RotationPath& rot, const FrequencyGrid& grid) {
  if (grid.size() == 0 || grid.step <= 0.0) {
    fail(ErrorCategory::kInvalidArgument, "system_spectrum: empty frequency grid");
  }
  if (rot.eps.size() != rot.grid.points() || rot.eps.empty()) {
    fail(ErrorCategory::kDimension, "system_spectrum: malformed rotation path");
  }
  const auto n = rot.eps.front().rows();
  const std::size_t len = rot.eps.size();
  const std::size_t series = static_cast<std::size_t>(n * n);
  const std::vector<double> c = trapezoid_weights(len, rot.grid.step());
  std::vector<double> x(series * len);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      const auto s = static_cast<std::size_t>(a * n + b);
      for (std::size_t i = 0; i < len; ++i) x[s * len + i] = c[i] * rot.eps[i](a, b);
    }
  }
  std::vector<double> nu(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) nu[k] = grid.omega(k);
  std::vector<double> yr(series * nu.size()), yi(series * nu.size());
  kernels::PhaseSum args;
  args.series = series;
  args.length = len;
  args.x_re = x.data();
  args.outputs = nu.size();
  args.nu = nu.data();
  args.origin = 0.0;
  args.spacing = rot.grid.step();
  args.y_re = yr.data();
  args.y_im = yi.data();
  kernels::active_kernels().phase_sum(args);

  const double norm = 1.0 / std::sqrt(kTwoPi);
  SystemSpectrum spec;
  spec.grid = grid;
  spec.t = rot.grid.t;
  spec.values.assign(grid.size(), ComplexMatrix::Zero(n, n));
  for (std::size_t s = 0; s < series; ++s) {
    const auto a = static_cast<Eigen::Index>(s) / n;
    const auto b = static_cast<Eigen::Index>(s) % n;
    for (std::size_t k = 0; k < nu.size(); ++k) {
      spec.values[k](a, b) = norm * cplx(yr[s * nu.size() + k], yi[s * nu.size() + k]);
    }
  }
  return spec;
}

double control_energy(const ControlTrajectory& traj, EnergyKind kind,
                      const Operator& h0) {
  require_shape(traj);
  const double dt = traj.grid().step();
  const auto rows = traj.f.rows();
  double e = 0.0;
  if (kind == EnergyKind::kSpeed) {
    for (Eigen::Index k = 0; k + 1 < rows; ++k) {
      e += (traj.f.row(k + 1) - traj.f.row(k)).squaredNorm() / dt;
    }
    return e;
  }
  if (h0.size() == 0) {
    fail(ErrorCategory::kInvalidArgument,
         "control_energy: modulation energy needs H0");
  }
  if (h0.rows() != traj.dim || h0.cols() != traj.dim) {
    fail(ErrorCategory::kDimension, "control_energy: H0 dimension mismatch");
  }
  if (traj.kind == Parametrization::kEuler) {
    const auto b = bloch(h0);
    if (std::abs(b[0]) > 1e-14 || std::abs(b[1]) > 1e-14) {
      fail(ErrorCategory::kInvalidArgument,
           "control_energy: Euler modulation energy needs H0 along sigma_3");
    }
    const double w0 = 2.0 * b[2];
    for (Eigen::Index k = 0; k + 1 < rows; ++k) {
      const double d1 = (traj.f(k + 1, 0) - traj.f(k, 0)) / dt;
      const double d2 = (traj.f(k + 1, 1) - traj.f(k, 1)) / dt;
      const double d3 = (traj.f(k + 1, 2) - traj.f(k, 2)) / dt - w0;
      const double mid = 0.5 * (traj.f(k + 1, 1) + traj.f(k, 1));
      const double half = 0.5 * (traj.f(k + 1, 1) - traj.f(k, 1));
      const double mean_cos = std::cos(mid) * sinc(half);
      e += 0.25 * dt * (d1 * d1 + d2 * d2 + d3 * d3 + 2.0 * d1 * d3 * mean_cos);
    }
    return e;
  }
  const OperatorBasis basis = generate_basis(traj.dim);
  const Eigen::VectorXd ref = expand(h0, basis).real();
  for (Eigen::Index k = 0; k + 1 < rows; ++k) {
    const Eigen::VectorXd u = traj.f.row(k).transpose() - ref;
    const Eigen::VectorXd v = traj.f.row(k + 1).transpose() - ref;
    e += dt * (u.squaredNorm() + u.dot(v) + v.squaredNorm()) / 3.0;
  }
  return e;
}

ControlTrajectory reference_trajectory(const ControlTrajectory& traj, EnergyKind kind,
                                       const Operator& h0) {
  require_shape(traj);
  ControlTrajectory ref = traj;
  const auto rows = traj.f.rows();
  if (traj.pin_end) {
    for (Eigen::Index k = 0; k < rows; ++k) {
      const double s = static_cast<double>(k) / static_cast<double>(rows - 1);
      ref.f.row(k) = (1.0 - s) * traj.f.row(0) + s * traj.f.row(rows - 1);
    }
    return ref;
  }
  if (kind == EnergyKind::kSpeed) {
    for (Eigen::Index k = 0; k < rows; ++k) ref.f.row(k) = traj.f.row(0);
    return ref;
  }
  if (h0.size() == 0) {
    fail(ErrorCategory::kInvalidArgument, "reference_trajectory: modulation needs H0");
  }
  if (traj.kind == Parametrization::kEuler) {
    const double w0 = 2.0 * bloch(h0)[2];
    for (Eigen::Index k = 0; k < rows; ++k) {
      ref.f.row(k) << 0.0, 0.0, w0 * traj.grid().at(static_cast<std::size_t>(k));
    }
    return ref;
  }
  const Eigen::VectorXd w = expand(h0, generate_basis(traj.dim)).real();
  for (Eigen::Index k = 0; k < rows; ++k) ref.f.row(k) = w.transpose();
  if (traj.pin_start) ref.f.row(0) = traj.f.row(0);
  return ref;
}

void write_trajectory_csv(std::ostream& out, const ControlTrajectory& traj) {
  std::vector<std::string> header{"tau"};
  for (std::size_t c = 0; c < traj.params(); ++c) {
    header.push_back("f_" + std::to_string(c + 1));
  }
  csv::write_header(out, header);
  const TimeGrid grid = traj.grid();
  for (Eigen::Index k = 0; k < traj.f.rows(); ++k) {
    std::vector<double> row{grid.at(static_cast<std::size_t>(k))};
    for (Eigen::Index c = 0; c < traj.f.cols(); ++c) row.push_back(traj.f(k, c));
    csv::write_row(out, row);
  }
}

ControlTrajectory read_trajectory_csv(std::istream& in, int dim) {
  const csv::Table table = csv::read(in);
  const std::size_t tau_col = table.column("tau");
  std::size_t p = 0;
  while (table.has_column("f_" + std::to_string(p + 1))) ++p;
  if (table.rows.size() < 2 || p == 0) {
    fail(ErrorCategory::kValidation, "trajectory csv: need >= 2 rows and f_ columns");
  }
  const std::size_t n = table.rows.size() - 1;
  ControlTrajectory traj = ControlTrajectory::zeros(table.rows.back()[tau_col], n, dim);
  if (traj.params() != p) {
    fail(ErrorCategory::kValidation, "trajectory csv: expected " +
                                         std::to_string(traj.params()) +
                                         " control columns, got " + std::to_string(p));
  }
  for (std::size_t k = 0; k <= n; ++k) {
    const double tau = table.rows[k][tau_col];
    if (std::abs(tau - traj.grid().at(k)) > 1e-9 * traj.t) {
      fail(ErrorCategory::kValidation, "trajectory csv: knots are not uniform from 0");
    }
    for (std::size_t c = 0; c < p; ++c) {
      traj.f(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)) =
          table.rows[k][table.column("f_" + std::to_string(c + 1))];
    }
  }
  return traj;
}

void write_spectrum_csv(std::ostream& out, const FrequencyGrid& grid,
                        const std::vector<ComplexMatrix>& values) {
  const auto n = values.empty() ? Eigen::Index{0} : values.front().rows();
  std::vector<std::string> header{"omega"};
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      const std::string tag = std::to_string(a + 1) + std::to_string(b + 1);
      header.push_back("Re_" + tag);
      header.push_back("Im_" + tag);
    }
  }
  csv::write_header(out, header);
  for (std::size_t k = 0; k < values.size(); ++k) {
    std::vector<double> row{grid.omega(k)};
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < n; ++b) {
        row.push_back(values[k](a, b).real());
        row.push_back(values[k](a, b).imag());
      }
    }
    csv::write_row(out, row);
  }
}

}  // namespace overlap
