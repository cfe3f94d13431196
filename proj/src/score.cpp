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

#include "overlap/score.hpp"

#include <ostream>

#include <Eigen/Eigenvalues>
#include "json.hpp"

#include "overlap/csv.hpp"
#include "overlap/kernels.hpp"

namespace overlap {

namespace {

bool same_grid(const FrequencyGrid& a, const FrequencyGrid& b) {
  return a.half == b.half && std::abs(a.step - b.step) <= 1e-12 * b.step;
}

void require_gamma(const ComplexMatrix& gamma, Eigen::Index n, const char* who) {
  if (gamma.rows() != n || gamma.cols() != n) {
    fail(ErrorCategory::kDimension, std::string(who) + ": Gamma/channel mismatch");
  }
}

// sum_k w_k Tr[eps_t Gamma eps_t^dagger X_k]
cplx spectral_overlap(const SystemSpectrum& sys, const std::vector<ComplexMatrix>& x,
                      const ComplexMatrix& gamma) {
  const std::vector<double> w = trapezoid_weights(sys.grid.size(), sys.grid.step);
  cplx total(0.0);
  for (std::size_t k = 0; k < sys.values.size(); ++k) {
    const ComplexMatrix& e = sys.values[k];
    total += w[k] * (e * gamma * e.adjoint() * x[k]).trace();
  }
  return total;
}

}  // namespace

const char* score_kind_name(ScoreKind kind) {
  switch (kind) {
    case ScoreKind::kExpectation:
      return "expectation";
    case ScoreKind::kPurity:
      return "purity";
    case ScoreKind::kLinearEntropy:
      return "linear_entropy";
    case ScoreKind::kFidelity:
      return "fidelity";
    case ScoreKind::kGateError:
      return "gate_error";
  }
  return "unknown";
}

ScoreKind parse_score_kind(const std::string& name) {
  for (ScoreKind k : {ScoreKind::kExpectation, ScoreKind::kPurity,
                      ScoreKind::kLinearEntropy, ScoreKind::kFidelity,
                      ScoreKind::kGateError}) {
    if (name == score_kind_name(k)) return k;
  }
  fail(ErrorCategory::kConfig, "unknown score kind '" + name + "'");
}

Operator mixture_state(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    fail(ErrorCategory::kInvalidArgument, "mixture_state: p must lie in [0, 1]");
  }
  Operator rho = Operator::Zero(2, 2);
  rho(0, 0) = p;
  rho(1, 1) = 1.0 - p;
  return rho;
}

void validate_state(const Operator& rho, const Tolerances& tol) {
  if (rho.rows() != rho.cols() || rho.rows() < 2) {
    fail(ErrorCategory::kDimension, "state: must be a square matrix of dim >= 2");
  }
  if (!is_hermitian(rho, tol)) fail(ErrorCategory::kValidation, "state: not Hermitian");
  if (std::abs(rho.trace() - 1.0) > tol.trace) {
    fail(ErrorCategory::kValidation, "state: trace differs from 1");
  }
  if (min_eigenvalue(rho) < -tol.psd) {
    fail(ErrorCategory::kValidation, "state: negative eigenvalue");
  }
}

Operator gradient_operator(ScoreKind kind, const Operator& rho0,
                           const ScoreExtras& extra) {
  const auto d = rho0.rows();
  switch (kind) {
    case ScoreKind::kExpectation:
      if (extra.observable.size() == 0) {
        fail(ErrorCategory::kInvalidArgument,
             "gradient_operator: expectation score needs an observable");
      }
      if (extra.observable.rows() != d || !is_hermitian(extra.observable)) {
        fail(ErrorCategory::kInvalidArgument,
             "gradient_operator: observable must be Hermitian and match rho0");
      }
      return extra.observable;
    case ScoreKind::kPurity:
      return 2.0 * rho0;
    case ScoreKind::kLinearEntropy: {
      const double k = extra.k > 0.0 ? extra.k
                                     : static_cast<double>(d) / static_cast<double>(d - 1);
      return -2.0 * k * rho0;
    }
    case ScoreKind::kFidelity: {
      if (extra.psi.size() != d || extra.psi.norm() == 0.0) {
        fail(ErrorCategory::kInvalidArgument,
             "gradient_operator: fidelity score needs a nonzero |psi> of dim d");
      }
      const Eigen::VectorXcd psi = extra.psi.normalized();
      return psi * psi.adjoint();
    }
    case ScoreKind::kGateError:
      break;
  }
  fail(ErrorCategory::kInvalidArgument,
       "gradient_operator: gate error is state averaged and has no P");
}

ScoreSpec make_score_spec(ScoreKind kind, const Operator& rho0, const ScoreExtras& extra,
                          const Tolerances& tol) {
  ScoreSpec spec;
  spec.kind = kind;
  spec.rho0 = rho0;
  if (kind == ScoreKind::kFidelity && rho0.size() == 0) {
    if (extra.psi.size() < 2) {
      fail(ErrorCategory::kInvalidArgument, "fidelity score needs |psi>");
    }
    const Eigen::VectorXcd psi = extra.psi.normalized();
    spec.rho0 = psi * psi.adjoint();
  }
  validate_state(spec.rho0, tol);
  if (kind == ScoreKind::kGateError) {
    spec.p_hat = Operator::Zero(spec.rho0.rows(), spec.rho0.cols());
    spec.commuting = true;
    return spec;
  }
  spec.p_hat = gradient_operator(kind, spec.rho0, extra);
  spec.commuting = max_abs(commutator(spec.rho0, spec.p_hat)) <= tol.commuting;
  return spec;
}

ComplexMatrix gamma_matrix(const Operator& rho0, const Operator& p_hat,
                           const OperatorBasis& basis) {
  if (rho0.rows() != basis.dim || p_hat.rows() != basis.dim) {
    fail(ErrorCategory::kDimension, "gamma_matrix: dimension mismatch");
  }
  const auto n = static_cast<Eigen::Index>(basis.size());
  ComplexMatrix gamma(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Operator left = rho0 * commutator(basis[static_cast<std::size_t>(j)], p_hat);
    for (Eigen::Index k = 0; k < n; ++k) {
      gamma(k, j) = (left * basis[static_cast<std::size_t>(k)]).trace();
    }
  }
  return gamma;
}

ComplexMatrix averaged_gamma(int d) {
  const Eigen::Index n = d * d - 1;
  return ComplexMatrix::Identity(n, n) *
         (-static_cast<double>(d) / static_cast<double>(d + 1));
}

ComplexMatrix spec_gamma(const ScoreSpec& spec, const OperatorBasis& basis) {
  if (spec.kind == ScoreKind::kGateError) return averaged_gamma(basis.dim);
  return gamma_matrix(spec.rho0, spec.p_hat, basis);
}

Prerotation prerotate(const Operator& rho0, const Operator& p_hat) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (p_hat + p_hat.adjoint()));
  Prerotation out;
  out.v = solver.eigenvectors();
  out.rho0 = out.v.adjoint() * rho0 * out.v;
  out.p_hat = out.v.adjoint() * p_hat * out.v;
  return out;
}

QuadraticOverlap::QuadraticOverlap(const CorrelationPath& corr, const TimeGrid& grid,
                                   ComplexMatrix gamma, Mode mode)
    : mode_(mode), gamma_(std::move(gamma)) {
  if (grid.steps < 1) fail(ErrorCategory::kInvalidArgument, "score: empty time grid");
  const double h = grid.step();
  if (std::abs(corr.dt - h) > 1e-9 * h) {
    fail(ErrorCategory::kDimension,
         "score: correlation step " + csv::format(corr.dt) +
             " differs from time step " + csv::format(h));
  }
  if (corr.half < grid.steps) {
    fail(ErrorCategory::kDimension, "score: correlation window shorter than t");
  }
  len_ = grid.points();
  n_ = static_cast<Eigen::Index>(corr.channels());
  require_gamma(gamma_, n_, "score");
  c_ = trapezoid_weights(len_, h);

  const auto l = static_cast<std::ptrdiff_t>(len_);
  k_.reserve(2 * len_ - 1);
  for (std::ptrdiff_t m = -(l - 1); m <= l - 1; ++m) {
    if (mode_ == Mode::kFull || m > 0) {
      k_.push_back(corr.at(m));
    } else if (m == 0) {
      k_.push_back(0.5 * corr.at(0));
    } else {
      k_.push_back(ComplexMatrix::Zero(n_, n_));
    }
  }
  const auto entries = static_cast<std::size_t>(n_ * n_);
  active_.assign(entries, false);
  h_re_.assign(entries, std::vector<double>(k_.size()));
  h_im_ = h_re_;
  for (Eigen::Index a = 0; a < n_; ++a) {
    for (Eigen::Index b = 0; b < n_; ++b) {
      const auto e = static_cast<std::size_t>(a * n_ + b);
      for (std::size_t m = 0; m < k_.size(); ++m) {
        h_re_[e][m] = k_[m](a, b).real();
        h_im_[e][m] = k_[m](a, b).imag();
        if (k_[m](a, b) != cplx(0.0)) active_[e] = true;
      }
    }
  }
  ht_re_ = h_re_;
  ht_im_ = h_im_;
  const std::size_t last = k_.size() - 1;
  for (Eigen::Index a = 0; a < n_; ++a) {
    for (Eigen::Index b = 0; b < n_; ++b) {
      const auto e = static_cast<std::size_t>(a * n_ + b);
      const auto f = static_cast<std::size_t>(b * n_ + a);
      for (std::size_t m = 0; m <= last; ++m) {
        ht_re_[e][m] = h_re_[f][last - m];
        ht_im_[e][m] = h_im_[f][last - m];
      }
    }
  }
}

std::vector<ComplexMatrix> QuadraticOverlap::convolve(const std::vector<RealMatrix>& eps,
                                                      bool transpose_kernel) const {
  if (eps.size() != len_) fail(ErrorCategory::kDimension, "score: path length mismatch");
  const std::size_t n = static_cast<std::size_t>(n_);
  std::vector<std::vector<double>> x(n, std::vector<double>(n * len_));
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t j = 0; j < len_; ++j) {
        x[b][c * len_ + j] =
            c_[j] * eps[j](static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(c));
      }
    }
  }
  std::vector<std::vector<double>> yr(n, std::vector<double>(n * len_, 0.0));
  std::vector<std::vector<double>> yi = yr;
  const auto& table = kernels::active_kernels();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const std::size_t e = a * n + b;
      const bool live = transpose_kernel ? active_[b * n + a] : active_[e];
      if (!live) continue;
      kernels::Toeplitz args;
      args.length = len_;
      args.h_re = transpose_kernel ? ht_re_[e].data() : h_re_[e].data();
      args.h_im = transpose_kernel ? ht_im_[e].data() : h_im_[e].data();
      args.series = n;
      args.x = x[b].data();
      args.y_re = yr[a].data();
      args.y_im = yi[a].data();
      args.accumulate = true;
      table.toeplitz(args);
    }
  }
  std::vector<ComplexMatrix> out(len_, ComplexMatrix(n_, n_));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t i = 0; i < len_; ++i) {
        out[i](static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)) =
            cplx(yr[a][c * len_ + i], yi[a][c * len_ + i]);
      }
    }
  }
  return out;
}

cplx QuadraticOverlap::evaluate(const std::vector<RealMatrix>& eps) const {
  const std::vector<ComplexMatrix> a = convolve(eps, false);
  cplx q(0.0);
  for (std::size_t i = 0; i < len_; ++i) {
    q += c_[i] * eps[i].cast<cplx>().cwiseProduct(a[i] * gamma_).sum();
  }
  return q;
}

void QuadraticOverlap::set_base(const std::vector<RealMatrix>& eps) {
  base_eps_ = eps;
  a_ = convolve(eps, false);
  bt_ = convolve(eps, true);
  base_ = 0.0;
  for (std::size_t i = 0; i < len_; ++i) {
    base_ += c_[i] * eps[i].cast<cplx>().cwiseProduct(a_[i] * gamma_).sum();
  }
}

cplx QuadraticOverlap::delta(const std::vector<std::size_t>& idx,
                             const std::vector<RealMatrix>& d) const {
  if (a_.size() != len_) fail(ErrorCategory::kRuntime, "score: delta without base");
  const ComplexMatrix gamma_t = gamma_.transpose();
  cplx q(0.0);
  for (std::size_t s = 0; s < idx.size(); ++s) {
    const std::size_t i = idx[s];
    const ComplexMatrix di = d[s].cast<cplx>();
    q += c_[i] * di.cwiseProduct(a_[i] * gamma_).sum();
    q += c_[i] * di.cwiseProduct(bt_[i] * gamma_t).sum();
    for (std::size_t r = 0; r < idx.size(); ++r) {
      const std::size_t j = idx[r];
      const auto m = static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(j);
      q += c_[i] * c_[j] * di.cwiseProduct(lag(m) * d[r].cast<cplx>() * gamma_).sum();
    }
  }
  return q;
}

double score_timedomain(const RotationPath& rot, const CorrelationPath& corr,
                        const ComplexMatrix& gamma, const Tolerances& tol) {
  const QuadraticOverlap q(corr, rot.grid, gamma, QuadraticOverlap::Mode::kFull);
  const cplx value = q.evaluate(rot.eps);
  const double t = rot.grid.t;
  const double scale = t * t * max_abs(corr.at(0)) * max_abs(gamma) *
                       static_cast<double>(gamma.rows());
  if (std::abs(value.imag()) > tol.imaginary_residue * std::max(scale, std::abs(value.real()))) {
    fail(ErrorCategory::kValidation,
         "score_timedomain: imaginary residue " + csv::format(value.imag()) +
             " (non-commuting input? use score_noncommuting)");
  }
  return value.real();
}

double score_spectral(const SystemSpectrum& sys, const BathModel& bath,
                      const ComplexMatrix& gamma, const Tolerances& tol) {
  if (!same_grid(sys.grid, bath.grid) || sys.values.size() != bath.spectrum.size()) {
    fail(ErrorCategory::kDimension, "score_spectral: frequency grid mismatch");
  }
  if (!sys.values.empty()) require_gamma(gamma, sys.values.front().rows(), "score_spectral");
  if (static_cast<std::size_t>(gamma.rows()) != bath.channels) {
    fail(ErrorCategory::kDimension, "score_spectral: bath channel mismatch");
  }
  const cplx value = spectral_overlap(sys, bath.spectrum, gamma);
  const double scale = sys.t * bath.sup_trace() * max_abs(gamma) *
                       static_cast<double>(gamma.rows());
  if (std::abs(value.imag()) > tol.imaginary_residue * std::max(scale, std::abs(value.real()))) {
    fail(ErrorCategory::kValidation,
         "score_spectral: imaginary residue " + csv::format(value.imag()));
  }
  return value.real();
}

std::vector<ComplexMatrix> system_spectral_matrix(const SystemSpectrum& sys,
                                                  const ComplexMatrix& gamma) {
  std::vector<ComplexMatrix> f;
  f.reserve(sys.values.size());
  for (const auto& e : sys.values) f.push_back(e * gamma * e.adjoint() / sys.t);
  return f;
}

double gate_error(const SystemSpectrum& sys, const BathModel& bath, int d,
                  const Tolerances& tol) {
  const PsdReport psd = check_psd(bath, tol);
  if (!psd.pass) {
    fail(ErrorCategory::kValidation,
         "gate_error: bath spectrum is not PSD (min eigenvalue " +
             csv::format(psd.min_eigenvalue) + ")");
  }
  return -score_spectral(sys, bath, averaged_gamma(d), tol);
}

double gate_error_timedomain(const RotationPath& rot, const CorrelationPath& corr, int d,
                             const Tolerances& tol) {
  return -score_timedomain(rot, corr, averaged_gamma(d), tol);
}

cplx haar_average_pair(const Operator& a, const Operator& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    fail(ErrorCategory::kDimension, "haar_average_pair: dimension mismatch");
  }
  const double d = static_cast<double>(a.rows());
  return ((a * b).trace() + a.trace() * b.trace()) / (d * (d + 1.0));
}

Eigen::VectorXcd haar_state(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXcd psi(d);
  for (int k = 0; k < d; ++k) psi(k) = cplx(normal(rng), normal(rng));
  return psi.normalized();
}

ScoreBounds score_bounds(const ComplexMatrix& gamma, const BathModel& bath, double t,
                         const Tolerances& tol) {
  const double sup = bath.sup_trace();
  if (!std::isfinite(sup)) {
    fail(ErrorCategory::kValidation, "score_bounds: unbounded bath spectrum");
  }
  const PsdParts parts = psd_split(hermitian_split(gamma).plus, tol);
  ScoreBounds b;
  b.hi = t * sup * parts.positive.trace().real();
  b.lo = -t * sup * parts.negative.trace().real();
  return b;
}

double score_noncommuting(const RotationPath& rot, const CorrelationPath& corr,
                          const ComplexMatrix& gamma) {
  const QuadraticOverlap q(corr, rot.grid, gamma, QuadraticOverlap::Mode::kCausal);
  return 2.0 * q.evaluate(rot.eps).real();
}

double score_noncommuting_spectral(const SystemSpectrum& sys,
                                   const std::vector<ComplexMatrix>& causal,
                                   const ComplexMatrix& gamma) {
  if (causal.size() != sys.values.size()) {
    fail(ErrorCategory::kDimension, "score_noncommuting_spectral: grid mismatch");
  }
  if (!sys.values.empty()) {
    require_gamma(gamma, sys.values.front().rows(), "score_noncommuting_spectral");
  }
  return 2.0 * spectral_overlap(sys, causal, gamma).real();
}

void write_score_report(std::ostream& out, const ScoreReport& r) {
  nlohmann::ordered_json j;
  j["p_time"] = r.p_time;
  j["p_spectral"] = r.p_spectral;
  j["p_tilde"] = r.p_tilde;
  j["bound_lo"] = r.bound_lo;
  j["bound_hi"] = r.bound_hi;
  if (r.has_gate_error) {
    j["gate_error"] = r.gate_error;
  } else {
    j["gate_error"] = nullptr;
  }
  j["commuting"] = r.commuting;
  j["t"] = r.t;
  j["time_steps"] = r.time_steps;
  j["omega_points"] = r.omega_points;
  j["omega_cutoff"] = r.omega_cutoff;
  j["omega_step"] = r.omega_step;
  j["kappa"] = r.kappa;
  out << j.dump(2) << '\n';
}

}  // namespace overlap
