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

#include "oracles.hpp"

#include <cmath>

namespace overlap::testing {

cplx direct_double_sum(const std::vector<RealMatrix>& eps, const CorrelationPath& corr,
                       const ComplexMatrix& gamma, double h, bool causal) {
  const std::size_t n = eps.size();
  const std::vector<double> c = trapezoid_weights(n, h);
  cplx sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto m = static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(j);
      double w = c[i] * c[j];
      if (causal) {
        if (m < 0) continue;
        if (m == 0) w *= 0.5;
      }
      const ComplexMatrix r = eps[i].transpose().cast<cplx>() * corr.at(m) * eps[j].cast<cplx>();
      sum += w * (r * gamma).trace();
    }
  }
  return sum;
}

std::vector<ComplexMatrix> direct_system_spectrum(const RotationPath& rot,
                                                  const FrequencyGrid& grid) {
  const std::vector<double> c = trapezoid_weights(rot.eps.size(), rot.grid.step());
  std::vector<ComplexMatrix> out;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double w = grid.omega(k);
    ComplexMatrix acc = ComplexMatrix::Zero(rot.eps[0].rows(), rot.eps[0].cols());
    for (std::size_t i = 0; i < rot.eps.size(); ++i) {
      acc += (c[i] * std::exp(cplx(0.0, w * rot.grid.at(i)))) * rot.eps[i].cast<cplx>();
    }
    out.push_back(acc / std::sqrt(kTwoPi));
  }
  return out;
}

double direct_spectral_overlap(const std::vector<ComplexMatrix>& sys, const BathModel& bath,
                               const ComplexMatrix& gamma) {
  const std::vector<double> w = trapezoid_weights(bath.grid.size(), bath.grid.step);
  cplx sum = 0.0;
  for (std::size_t k = 0; k < sys.size(); ++k) {
    sum += w[k] * (sys[k] * gamma * sys[k].adjoint() * bath.spectrum[k]).trace();
  }
  return sum.real();
}

ComplexMatrix direct_correlation(const BathModel& bath, double s) {
  const std::vector<double> w = trapezoid_weights(bath.grid.size(), bath.grid.step);
  ComplexMatrix acc = ComplexMatrix::Zero(bath.spectrum[0].rows(), bath.spectrum[0].cols());
  for (std::size_t k = 0; k < bath.grid.size(); ++k) {
    acc += (w[k] * std::exp(cplx(0.0, -bath.grid.omega(k) * s))) * bath.spectrum[k];
  }
  return acc / kTwoPi;
}

cplx lorentzian_correlation(double weight, double width, double center, double s) {
  return 0.5 * weight * width * std::exp(-width * std::abs(s)) * std::exp(cplx(0.0, -center * s));
}

ComplexMatrix qubit_mixture_gamma(double p, double k) {
  // rho0 = (1/2)(1 + z s3) with z = 2p - 1 and P = -2k rho0, so
  // [S_j, P] = -k z [s_j, s3] and Gamma_kj = -k z <[s_j, s3] s_k>.
  // [s1, s3] = -2i s2, [s2, s3] = 2i s1; <s_a s_b> = delta_ab + i e_abc z_c.
  const double z = 2.0 * p - 1.0;
  const cplx i(0.0, 1.0);
  auto expect = [&](int a, int b) -> cplx {
    if (a == b) return 1.0;
    if (a == 1 && b == 2) return i * z;
    if (a == 2 && b == 1) return -i * z;
    return 0.0;
  };
  ComplexMatrix g = ComplexMatrix::Zero(3, 3);
  for (int kk = 1; kk <= 3; ++kk) {
    // j = 1: [s1, s3] s_k = -2i s2 s_k; j = 2: [s2, s3] s_k = 2i s1 s_k.
    g(kk - 1, 0) = -k * z * (-2.0 * i) * expect(2, kk);
    g(kk - 1, 1) = -k * z * (2.0 * i) * expect(1, kk);
  }
  return g;
}

Vector five_point_gradient(const std::function<double(const Vector&)>& fn, const Vector& x,
                           double h, const std::vector<bool>& mask) {
  Vector g = Vector::Zero(x.size());
  Vector y = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!mask[static_cast<std::size_t>(i)]) continue;
    auto at = [&](double d) {
      y(i) = x(i) + d;
      const double v = fn(y);
      y(i) = x(i);
      return v;
    };
    g(i) = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
  }
  return g;
}

ControlTrajectory random_euler(std::mt19937_64& rng, double t, std::size_t knots, double w0,
                               double amplitude, std::size_t modes) {
  ControlTrajectory traj = free_evolution(t, knots, w0);
  std::normal_distribution<double> normal;
  const TimeGrid grid = traj.grid();
  for (Eigen::Index c = 0; c < 3; ++c) {
    for (std::size_t m = 1; m <= modes; ++m) {
      const double a = amplitude * normal(rng) / static_cast<double>(m);
      for (std::size_t k = 0; k <= knots; ++k) {
        traj.f(static_cast<Eigen::Index>(k), c) +=
            a * std::sin(kPi * (static_cast<double>(m) - 0.5) * grid.at(k) / t);
      }
    }
  }
  return traj;
}

std::size_t resolving_half(double cutoff, double width, std::size_t at_least) {
  return std::max(at_least, static_cast<std::size_t>(std::ceil(10.0 * cutoff / width)) + 1);
}

BathModel random_lorentzian(std::mt19937_64& rng, double t, std::size_t quad_steps,
                            double kappa, const BathDraw& draw) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LorentzianParams p;
  p.center = draw.center_lo + (draw.center_hi - draw.center_lo) * u(rng);
  p.width = draw.width_lo + (draw.width_hi - draw.width_lo) * u(rng);
  p.weight = 0.2 + 0.8 * u(rng);
  if (u(rng) < draw.tail_probability) {
    p.tail_weight = 0.5 * u(rng);
    p.tail_width = draw.width_lo + (draw.width_hi - draw.width_lo) * u(rng);
  }
  p.kappa = kappa;
  p.cutoff = kPi * static_cast<double>(quad_steps) / t;
  const double narrow = p.tail_weight > 0.0 ? std::min(p.width, p.tail_width) : p.width;
  p.step = p.cutoff / static_cast<double>(resolving_half(p.cutoff, narrow, quad_steps + 1));
  p.channel_mask = {u(rng) < 0.8, u(rng) < 0.8, true};
  return make_lorentzian_bath(p);
}

BathModel random_correlated_bath(std::mt19937_64& rng, double t, std::size_t quad_steps) {
  // Widths capped at 1 so the grid also resolves the rank-1 term.
  BathDraw draw;
  draw.width_hi = 1.0;
  BathModel bath = random_lorentzian(rng, t, quad_steps, 1.0, draw);
  std::normal_distribution<double> normal;
  Eigen::VectorXcd v(3);
  for (int i = 0; i < 3; ++i) v(i) = cplx(normal(rng), normal(rng));
  const double center = 2.0 * normal(rng);
  const double width = 1.0;
  for (std::size_t k = 0; k < bath.grid.size(); ++k) {
    const double d = bath.grid.omega(k) - center;
    bath.spectrum[k] += (width * width / (d * d + width * width)) * (v * v.adjoint());
  }
  bath.feature_width = std::min(bath.feature_width, width);
  return bath;
}

Instance make_instance(const ControlTrajectory& traj, const BathModel& bath,
                       std::size_t quad_steps) {
  Instance in;
  in.t = traj.t;
  in.grid = {traj.t, quad_steps};
  in.traj = traj;
  in.bath = bath;
  in.corr = correlation_from_spectrum(bath);
  in.basis = generate_basis(2);
  in.path = propagators(traj, in.grid);
  in.rot = rotation_path(in.path, in.grid, in.basis);
  in.sys = system_spectrum(in.rot, bath.grid);
  return in;
}

}  // namespace overlap::testing
