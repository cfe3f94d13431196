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

#include "overlap/sim.hpp"

#include <cmath>
#include <ostream>

#include "overlap/csv.hpp"

namespace overlap {

namespace {

using OpSet = std::vector<Operator>;

std::vector<OpSet> moved_couplings(const std::vector<Operator>& path,
                                   const OperatorBasis& couplings) {
  std::vector<OpSet> out(path.size());
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path[i].rows() != couplings.dim) {
      fail(ErrorCategory::kDimension, "sim: propagator/coupling dimension mismatch");
    }
    out[i].reserve(couplings.size());
    for (std::size_t j = 0; j < couplings.size(); ++j) {
      out[i].push_back(path[i].adjoint() * couplings[j] * path[i]);
    }
  }
  return out;
}

void require_corr(const CorrelationPath& corr, double dt, std::size_t lags,
                  std::size_t channels, const char* who) {
  if (std::abs(corr.dt - dt) > 1e-9 * dt) {
    fail(ErrorCategory::kDimension, std::string(who) + ": correlation step mismatch");
  }
  if (corr.half < lags) {
    fail(ErrorCategory::kDimension, std::string(who) + ": correlation window too short");
  }
  if (corr.channels() != channels) {
    fail(ErrorCategory::kDimension, std::string(who) + ": channel count mismatch");
  }
}

// out_j += w sum_k Phi_jk(lag) x_k
void add_correlated(OpSet& out, const CorrelationPath& corr, std::ptrdiff_t lag, double w,
                    const OpSet& x) {
  const ComplexMatrix& phi = corr.at(lag);
  const auto n = static_cast<Eigen::Index>(x.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const cplx c = phi(j, k);
      if (c == cplx(0.0)) continue;
      out[static_cast<std::size_t>(j)] += (w * c) * x[static_cast<std::size_t>(k)];
    }
  }
}

OpSet zeros_like(const OpSet& x) {
  OpSet out;
  for (const auto& op : x) out.push_back(Operator::Zero(op.rows(), op.cols()));
  return out;
}

// -sum_j [S_j, L_j rho - rho L_j^dagger]
Operator tcl_generator(const OpSet& s, const OpSet& lambda, const Operator& rho) {
  Operator out = Operator::Zero(rho.rows(), rho.cols());
  for (std::size_t j = 0; j < s.size(); ++j) {
    const Operator x = lambda[j] * rho - rho * lambda[j].adjoint();
    out -= s[j] * x - x * s[j];
  }
  return out;
}

// -sum_j [S_j, M_j - M_j^dagger]
Operator nz_generator(const OpSet& s, const OpSet& memory) {
  Operator out = Operator::Zero(s.front().rows(), s.front().cols());
  for (std::size_t j = 0; j < s.size(); ++j) {
    const Operator x = memory[j] - memory[j].adjoint();
    out -= s[j] * x - x * s[j];
  }
  return out;
}

double linear_entropy(const Operator& rho, double k) {
  return k * (1.0 - (rho * rho).trace().real());
}

double default_k(const Operator& rho0, double k) {
  const double d = static_cast<double>(rho0.rows());
  return k > 0.0 ? k : d / (d - 1.0);
}

void check_step_size(const std::vector<Operator>& half_path, double limit) {
  for (std::size_t q = 0; q + 2 < half_path.size(); q += 2) {
    const Operator r = half_path[q + 2] * half_path[q].adjoint();
    const double dev = max_abs(r - Operator::Identity(r.rows(), r.cols()));
    if (dev > limit) {
      fail(ErrorCategory::kResolution,
           "master equation: step too large (||U(tau+h)U(tau)^+ - 1|| = " +
               csv::format(dev) + " > " + csv::format(limit) + ")");
    }
  }
}

struct MasterSetup {
  std::size_t steps;
  double h;
  std::vector<OpSet> s;
  double k;
};

MasterSetup setup_master(const Operator& rho0, const std::vector<Operator>& half_path,
                         const OperatorBasis& couplings, const CorrelationPath& corr,
                         double t, const MasterOptions& options, const char* who) {
  if (options.steps < 1) fail(ErrorCategory::kInvalidArgument, std::string(who) + ": steps < 1");
  if (half_path.size() != 2 * options.steps + 1) {
    fail(ErrorCategory::kDimension,
         std::string(who) + ": half-step path must have 2 steps + 1 points");
  }
  if (rho0.rows() != couplings.dim) {
    fail(ErrorCategory::kDimension, std::string(who) + ": rho0 dimension mismatch");
  }
  const double h = t / static_cast<double>(options.steps);
  require_corr(corr, 0.5 * h, 2 * options.steps, couplings.size(), who);
  check_step_size(half_path, options.max_step_rotation);
  return {options.steps, h, moved_couplings(half_path, couplings), default_k(rho0, options.k)};
}

void record(SimResult& out, const std::vector<Operator>& half_path, std::size_t n,
            const Operator& rho_i) {
  const Operator& u = half_path[2 * n];
  Operator rho = u * rho_i * u.adjoint();
  out.linear_entropy.push_back(linear_entropy(rho, out.k));
  out.rho.push_back(std::move(rho));
}

}  // namespace

const char* sim_method_name(SimMethod method) {
  switch (method) {
    case SimMethod::kDyson2:
      return "dyson2";
    case SimMethod::kTcl2:
      return "tcl2";
    case SimMethod::kNz2:
      return "nz2";
  }
  return "unknown";
}

std::vector<Operator> dyson2_state_change(const Operator& rho0,
                                          const std::vector<Operator>& path,
                                          const TimeGrid& grid,
                                          const OperatorBasis& couplings,
                                          const CorrelationPath& corr) {
  if (path.size() != grid.points()) fail(ErrorCategory::kDimension, "dyson2: path/grid mismatch");
  if (rho0.rows() != couplings.dim) fail(ErrorCategory::kDimension, "dyson2: rho0 mismatch");
  const double h = grid.step();
  require_corr(corr, h, grid.steps, couplings.size(), "dyson2");
  const std::vector<OpSet> s = moved_couplings(path, couplings);
  const std::size_t len = path.size();
  const std::vector<double> c = trapezoid_weights(len, h);

  auto dissipator = [&](const OpSet& sj, const OpSet& lambda) {
    Operator out = Operator::Zero(rho0.rows(), rho0.cols());
    for (std::size_t j = 0; j < sj.size(); ++j) {
      const Operator x = lambda[j] * rho0 - rho0 * lambda[j].adjoint();
      out += sj[j] * x - x * sj[j];
    }
    return out;
  };

  std::vector<Operator> delta(len, Operator::Zero(rho0.rows(), rho0.cols()));
  Operator acc = Operator::Zero(rho0.rows(), rho0.cols());
  for (std::size_t i = 0; i < len; ++i) {
    // Strictly earlier samples with their outer trapezoid weights.
    OpSet earlier = zeros_like(s[i]);
    for (std::size_t r = 0; r < i; ++r) {
      add_correlated(earlier, corr, static_cast<std::ptrdiff_t>(i - r), c[r], s[r]);
    }
    if (i > 0) {
      OpSet end = earlier;
      add_correlated(end, corr, 0, 0.25 * h, s[i]);
      delta[i] = -(acc + 0.5 * h * dissipator(s[i], end));
    }
    OpSet interior = earlier;
    add_correlated(interior, corr, 0, 0.5 * c[i], s[i]);
    acc += c[i] * dissipator(s[i], interior);
  }
  return delta;
}

double dyson2_score(const Operator& rho0, const Operator& p_hat,
                    const std::vector<Operator>& path, const TimeGrid& grid,
                    const OperatorBasis& couplings, const CorrelationPath& corr) {
  const std::vector<Operator> delta = dyson2_state_change(rho0, path, grid, couplings, corr);
  return (p_hat * delta.back()).trace().real();
}

SimResult dyson2_trace(const Operator& rho0, const std::vector<Operator>& path,
                       const TimeGrid& grid, const OperatorBasis& couplings,
                       const CorrelationPath& corr, double k) {
  const std::vector<Operator> delta = dyson2_state_change(rho0, path, grid, couplings, corr);
  SimResult out;
  out.method = SimMethod::kDyson2;
  out.grid = grid;
  out.k = default_k(rho0, k);
  const double s0 = linear_entropy(rho0, out.k);
  for (std::size_t l = 0; l < path.size(); ++l) {
    out.rho.push_back(path[l] * (rho0 + delta[l]) * path[l].adjoint());
    out.linear_entropy.push_back(s0 - 2.0 * out.k * (rho0 * delta[l]).trace().real());
  }
  return out;
}

SimResult tcl2_integrate(const Operator& rho0, const std::vector<Operator>& half_path,
                         const OperatorBasis& couplings, const CorrelationPath& corr, double t,
                         const MasterOptions& options) {
  const MasterSetup m = setup_master(rho0, half_path, couplings, corr, t, options, "tcl2");
  const double delta = 0.5 * m.h;
  const std::size_t points = half_path.size();

  // Lambda_j(q) = int_0^{tau_q} sum_k Phi_jk(tau_q - s) S_k(s) ds, trapezoid.
  std::vector<OpSet> lambda(points, zeros_like(m.s[0]));
  for (std::size_t q = 1; q < points; ++q) {
    for (std::size_t r = 0; r <= q; ++r) {
      const double w = (r == 0 || r == q) ? 0.5 * delta : delta;
      add_correlated(lambda[q], corr, static_cast<std::ptrdiff_t>(q - r), w, m.s[r]);
    }
  }

  SimResult out;
  out.method = SimMethod::kTcl2;
  out.grid = {t, m.steps};
  out.k = m.k;
  Operator rho = rho0;
  record(out, half_path, 0, rho);
  for (std::size_t n = 0; n < m.steps; ++n) {
    const std::size_t q = 2 * n;
    const Operator k1 = tcl_generator(m.s[q], lambda[q], rho);
    const Operator k2 = tcl_generator(m.s[q + 1], lambda[q + 1], rho + 0.5 * m.h * k1);
    const Operator k3 = tcl_generator(m.s[q + 1], lambda[q + 1], rho + 0.5 * m.h * k2);
    const Operator k4 = tcl_generator(m.s[q + 2], lambda[q + 2], rho + m.h * k3);
    rho += (m.h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    record(out, half_path, n + 1, rho);
  }
  return out;
}

SimResult nz2_integrate(const Operator& rho0, const std::vector<Operator>& half_path,
                        const OperatorBasis& couplings, const CorrelationPath& corr, double t,
                        const MasterOptions& options) {
  const MasterSetup m = setup_master(rho0, half_path, couplings, corr, t, options, "nz2");
  const double delta = 0.5 * m.h;
  const std::size_t points = half_path.size();
  std::size_t window = points;
  if (options.memory_window > 0.0) {
    window = static_cast<std::size_t>(std::ceil(options.memory_window / delta - 1e-9));
  }

  // history[r] = S_k(r) rho(r) for every half-grid point already settled.
  std::vector<OpSet> history(points);
  auto settle = [&](std::size_t r, const Operator& rho_r) {
    history[r].clear();
    for (const auto& sk : m.s[r]) history[r].push_back(sk * rho_r);
  };
  auto memory = [&](std::size_t q, const OpSet& tail) {
    // Trapezoid over r in [first, q]; r = q uses `tail`.
    const std::size_t first = q > window ? q - window : 0;
    OpSet out = zeros_like(m.s[q]);
    if (q == first) return out;
    for (std::size_t r = first; r <= q; ++r) {
      const double w = (r == first || r == q) ? 0.5 * delta : delta;
      add_correlated(out, corr, static_cast<std::ptrdiff_t>(q - r), w,
                     r == q ? tail : history[r]);
    }
    return out;
  };
  auto products = [&](std::size_t r, const Operator& rho_r) {
    OpSet out;
    for (const auto& sk : m.s[r]) out.push_back(sk * rho_r);
    return out;
  };
  auto generator = [&](std::size_t q, const Operator& stage) {
    return nz_generator(m.s[q], memory(q, products(q, stage)));
  };

  SimResult out;
  out.method = SimMethod::kNz2;
  out.grid = {t, m.steps};
  out.k = m.k;
  Operator rho = rho0;
  settle(0, rho);
  record(out, half_path, 0, rho);
  for (std::size_t n = 0; n < m.steps; ++n) {
    const std::size_t q = 2 * n;
    const Operator k1 = generator(q, rho);
    const Operator x2 = rho + 0.5 * m.h * k1;
    const Operator k2 = generator(q + 1, x2);
    const Operator x3 = rho + 0.5 * m.h * k2;
    const Operator k3 = generator(q + 1, x3);
    settle(q + 1, x3);  // provisional midpoint for the last stage
    const Operator k4 = generator(q + 2, rho + m.h * k3);
    const Operator next = rho + (m.h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    settle(q + 1, 0.5 * (rho + next) - (m.h / 8.0) * (k4 - k1));
    settle(q + 2, next);
    rho = next;
    record(out, half_path, n + 1, rho);
  }
  return out;
}

std::vector<double> ground_overlap_trace(const SimResult& result) {
  std::vector<double> out;
  out.reserve(result.rho.size());
  for (const auto& rho : result.rho) out.push_back(rho(rho.rows() - 1, rho.cols() - 1).real());
  return out;
}

void write_sim_csv(std::ostream& out, const SimResult& result) {
  const std::vector<double> overlap = ground_overlap_trace(result);
  out << "tau,overlap,S_L,method\n";
  for (std::size_t i = 0; i < result.rho.size(); ++i) {
    out << csv::format(result.grid.at(i)) << ',' << csv::format(overlap[i]) << ','
        << csv::format(result.linear_entropy[i]) << ',' << sim_method_name(result.method)
        << '\n';
  }
}

}  // namespace overlap
