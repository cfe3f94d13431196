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

#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>
#include "json.hpp"

#include "oracles.hpp"
#include "overlap/score.hpp"

namespace overlap {
namespace {

const cplx kI(0.0, 1.0);

Operator diag2(double a, double b) {
  Operator m = Operator::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

testing::Instance random_instance(std::uint64_t seed, double t = 5.0, std::size_t m = 100) {
  std::mt19937_64 rng(seed);
  const ControlTrajectory traj = testing::random_euler(rng, t, 10, 2.0 * kPi / t, 0.8);
  return testing::make_instance(traj, testing::random_lorentzian(rng, t, m, 1.0), m);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

TEST(GradientOperator, Examples) {
  const Operator rho = diag2(0.75, 0.25);
  EXPECT_LT(max_abs(gradient_operator(ScoreKind::kPurity, rho) - diag2(1.5, 0.5)), 1e-15);
  ScoreExtras ex;
  ex.k = 2.0;
  EXPECT_LT(max_abs(gradient_operator(ScoreKind::kLinearEntropy, rho, ex) - diag2(-3.0, -1.0)), 1e-15);
  // Default k for a qubit is d/(d-1) = 2.
  EXPECT_LT(max_abs(gradient_operator(ScoreKind::kLinearEntropy, rho) - diag2(-3.0, -1.0)), 1e-15);
  ScoreExtras fid;
  fid.psi = Eigen::Vector2cd(0.0, 1.0);  // |0> in the (|1>, |0>) ordering
  EXPECT_LT(max_abs(gradient_operator(ScoreKind::kFidelity, rho, fid) - diag2(0.0, 1.0)), 1e-15);
  ScoreExtras obs;
  obs.observable = pauli(1);
  EXPECT_LT(max_abs(gradient_operator(ScoreKind::kExpectation, rho, obs) - pauli(1)), 1e-15);
}

TEST(GradientOperator, ExpectationNeedsObservable) {
  EXPECT_THROW(gradient_operator(ScoreKind::kExpectation, diag2(0.5, 0.5)), Error);
  ScoreExtras obs;
  obs.observable = kI * pauli(1);
  EXPECT_THROW(gradient_operator(ScoreKind::kExpectation, diag2(0.5, 0.5), obs), Error);
}

TEST(ScoreSpec, MixtureStateOrdering) {
  EXPECT_LT(max_abs(mixture_state(0.25) - diag2(0.25, 0.75)), 1e-16);
  EXPECT_THROW(make_score_spec(ScoreKind::kPurity, diag2(0.6, 0.6)), Error);
  EXPECT_THROW(make_score_spec(ScoreKind::kPurity, diag2(1.2, -0.2)), Error);
}

TEST(ScoreSpec, CommutingFlag) {
  EXPECT_TRUE(make_score_spec(ScoreKind::kLinearEntropy, mixture_state(0.25)).commuting);
  ScoreExtras obs;
  obs.observable = pauli(1);
  EXPECT_FALSE(make_score_spec(ScoreKind::kExpectation, mixture_state(0.25), obs).commuting);
  EXPECT_TRUE(make_score_spec(ScoreKind::kExpectation, mixture_state(0.5), obs).commuting);
}

TEST(Gamma, QubitMixtureValue) {
  const OperatorBasis basis = generate_basis(2);
  const Operator rho = mixture_state(0.25);
  const ComplexMatrix g = gamma_matrix(rho, -4.0 * rho, basis);
  ComplexMatrix want = ComplexMatrix::Zero(3, 3);
  want(0, 0) = 1.0;
  want(0, 1) = 2.0 * kI;
  want(1, 0) = -2.0 * kI;
  want(1, 1) = 1.0;
  EXPECT_LT(max_abs(g - want), 1e-15);
  EXPECT_LT(max_abs(g - testing::qubit_mixture_gamma(0.25, 2.0)), 1e-15);
}

TEST(Gamma, MatchesPauliProductOracle) {
  const OperatorBasis basis = generate_basis(2);
  for (double p : {0.0, 0.1, 0.3, 0.5, 0.77, 1.0}) {
    for (double k : {0.5, 2.0}) {
      const Operator rho = mixture_state(p);
      EXPECT_LT(max_abs(gamma_matrix(rho, -2.0 * k * rho, basis) - testing::qubit_mixture_gamma(p, k)),
                1e-15);
    }
  }
}

TEST(Gamma, VanishesForMaximallyMixed) {
  for (int d : {2, 3, 4}) {
    const Operator rho = Operator::Identity(d, d) / d;
    EXPECT_LT(max_abs(gamma_matrix(rho, -4.0 * rho, generate_basis(d))), 1e-15);
  }
}

TEST(Property, CommutingPairsGiveHermitianGamma) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int d : {2, 3}) {
    const OperatorBasis basis = generate_basis(d);
    for (int trial = 0; trial < 10; ++trial) {
      // Shared eigenbasis from a random unitary.
      ComplexMatrix z(d, d);
      for (int i = 0; i < d * d; ++i) z.data()[i] = cplx(u(rng) - 0.5, u(rng) - 0.5);
      const ComplexMatrix v = Eigen::HouseholderQR<ComplexMatrix>(z).householderQ();
      Eigen::VectorXd pr(d), pp(d);
      for (int i = 0; i < d; ++i) {
        pr(i) = u(rng);
        pp(i) = 2.0 * u(rng) - 1.0;
      }
      pr /= pr.sum();
      const Operator rho = v * pr.cast<cplx>().asDiagonal() * v.adjoint();
      const Operator p_hat = v * pp.cast<cplx>().asDiagonal() * v.adjoint();
      const ComplexMatrix g = gamma_matrix(rho, p_hat, basis);
      EXPECT_LT(max_abs(g - g.adjoint()), 1e-12);
    }
  }
}

TEST(Property, HaarAveragedGammaConverges) {
  for (int d : {2, 3}) {
    std::mt19937_64 rng(100 + d);
    const OperatorBasis basis = generate_basis(d);
    const std::size_t samples = 100000;
    ComplexMatrix acc = ComplexMatrix::Zero(d * d - 1, d * d - 1);
    for (std::size_t s = 0; s < samples; ++s) {
      const Eigen::VectorXcd psi = haar_state(d, rng);
      const Operator rho = psi * psi.adjoint();
      acc += gamma_matrix(rho, rho, basis);
    }
    acc /= static_cast<double>(samples);
    EXPECT_LT(max_abs(acc - averaged_gamma(d)), 1e-2) << d;
  }
}

TEST(HaarPair, Examples) {
  EXPECT_NEAR(std::abs(haar_average_pair(pauli(0), pauli(0)) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(haar_average_pair(pauli(3), pauli(3)) - 1.0 / 3.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(haar_average_pair(pauli(1), pauli(2))), 0.0, 1e-15);
  EXPECT_THROW(haar_average_pair(pauli(1), Operator::Identity(3, 3)), Error);
}

TEST(HaarPair, MonteCarloSigma3) {
  std::mt19937_64 rng(17);
  double acc = 0.0;
  const std::size_t samples = 100000;
  for (std::size_t s = 0; s < samples; ++s) {
    const Eigen::VectorXcd psi = haar_state(2, rng);
    const double z = (psi.adjoint() * pauli(3) * psi)(0, 0).real();
    acc += z * z;
  }
  EXPECT_NEAR(acc / static_cast<double>(samples), 1.0 / 3.0, 5e-3);
}

TEST(Prerotation, DiagonalizesGradientOperator) {
  ScoreExtras obs;
  obs.observable = 0.3 * pauli(1) + 0.4 * pauli(3);
  const Operator rho = mixture_state(0.2);
  const Prerotation pr = prerotate(rho, obs.observable);
  EXPECT_LT(max_abs(pr.v.adjoint() * pr.v - Operator::Identity(2, 2)), 1e-14);
  Operator off = pr.p_hat;
  off.diagonal().setZero();
  EXPECT_LT(max_abs(off), 1e-14);
  EXPECT_NEAR(std::abs((pr.rho0 * pr.p_hat).trace() - (rho * obs.observable).trace()), 0.0, 1e-14);
}

TEST(TimeDomain, TrivialZeros) {
  const testing::Instance in = random_instance(1);
  EXPECT_EQ(score_timedomain(in.rot, in.corr, ComplexMatrix::Zero(3, 3)), 0.0);
  CorrelationPath zero = in.corr;
  for (auto& m : zero.values) m.setZero();
  EXPECT_EQ(score_timedomain(in.rot, zero, testing::qubit_mixture_gamma(0.25, 2.0)), 0.0);
}

TEST(TimeDomain, MatchesDirectDoubleSum) {
  const testing::Instance in = random_instance(2, 4.0, 60);
  const ComplexMatrix g = testing::qubit_mixture_gamma(0.25, 2.0);
  const cplx want = testing::direct_double_sum(in.rot.eps, in.corr, g, in.grid.step(), false);
  EXPECT_LT(rel(score_timedomain(in.rot, in.corr, g), want.real()), 1e-12);
}

TEST(Spectral, MatchesDirectOverlap) {
  const testing::Instance in = random_instance(3);
  const ComplexMatrix g = testing::qubit_mixture_gamma(0.1, 2.0);
  EXPECT_LT(rel(score_spectral(in.sys, in.bath, g), testing::direct_spectral_overlap(in.sys.values, in.bath, g)),
            1e-12);
  EXPECT_EQ(score_spectral(in.sys, in.bath, ComplexMatrix::Zero(3, 3)), 0.0);
}

TEST(Spectral, GridMismatchFails) {
  const testing::Instance in = random_instance(4);
  BathModel other = in.bath;
  other.grid.step *= 1.01;
  EXPECT_THROW(score_spectral(in.sys, other, testing::qubit_mixture_gamma(0.25, 2.0)), Error);
}

TEST(Property, TimeAndSpectralAgree) {
  for (std::uint64_t seed = 10; seed < 20; ++seed) {
    const testing::Instance in = random_instance(seed);
    for (double p : {0.0, 0.25, 0.4}) {
      const ComplexMatrix g = testing::qubit_mixture_gamma(p, 2.0);
      EXPECT_LT(rel(score_timedomain(in.rot, in.corr, g), score_spectral(in.sys, in.bath, g)), 1e-6)
          << seed << " " << p;
    }
  }
}

TEST(Property, CorrelatedBathTimeAndSpectralAgree) {
  std::mt19937_64 rng(31);
  const double t = 5.0;
  const std::size_t m = 100;
  for (int trial = 0; trial < 3; ++trial) {
    const ControlTrajectory traj = testing::random_euler(rng, t, 10, 1.0, 0.8);
    const testing::Instance in = testing::make_instance(traj, testing::random_correlated_bath(rng, t, m), m);
    const ComplexMatrix g = testing::qubit_mixture_gamma(0.3, 2.0);
    EXPECT_LT(rel(score_timedomain(in.rot, in.corr, g), score_spectral(in.sys, in.bath, g)), 1e-6);
  }
}

TEST(Spectral, DecouplingLimit) {
  // Free precession at w0 = 1 puts the modulation spectrum near |w| <= 1;
  // the bath sits at 30 with width 0.5.
  const double t = 10.0;
  const std::size_t m = 400;
  LorentzianParams lp;
  lp.center = 30.0;
  lp.width = 0.5;
  lp.cutoff = kPi * m / t;
  lp.step = lp.cutoff / static_cast<double>(testing::resolving_half(lp.cutoff, lp.width, m + 1));
  const testing::Instance in = testing::make_instance(free_evolution(t, 40, 1.0), make_lorentzian_bath(lp), m);
  const ComplexMatrix g = testing::qubit_mixture_gamma(0.25, 2.0);
  const ScoreBounds b = score_bounds(g, in.bath, t);
  EXPECT_LT(std::abs(score_spectral(in.sys, in.bath, g)), 1e-3 * (b.hi - b.lo));
}

TEST(Property, LinearInGamma) {
  const testing::Instance in = random_instance(5);
  const ComplexMatrix g = testing::qubit_mixture_gamma(0.2, 2.0);
  const double p = score_spectral(in.sys, in.bath, g);
  EXPECT_NE(p, 0.0);
  EXPECT_LT(rel(score_spectral(in.sys, in.bath, -g), -p), 1e-14);
  EXPECT_LT(rel(score_timedomain(in.rot, in.corr, 2.5 * g), 2.5 * score_timedomain(in.rot, in.corr, g)), 1e-12);
}

TEST(GateError, ZeroBath) {
  testing::Instance in = random_instance(6);
  BathModel zero = in.bath;
  for (auto& m : zero.spectrum) m.setZero();
  EXPECT_EQ(gate_error(in.sys, zero, 2), 0.0);
}

TEST(GateError, QubitPrefactor) {
  const testing::Instance in = random_instance(7);
  const double plain = score_spectral(in.sys, in.bath, ComplexMatrix::Identity(3, 3));
  EXPECT_LT(rel(gate_error(in.sys, in.bath, 2), 2.0 / 3.0 * plain), 1e-12);
  EXPECT_LT(rel(gate_error_timedomain(in.rot, in.corr, 2), gate_error(in.sys, in.bath, 2)), 1e-6);
}

TEST(GateError, NonPsdBathFails) {
  testing::Instance in = random_instance(8);
  in.bath.spectrum[in.bath.grid.half](0, 0) = -1.0;
  EXPECT_THROW(gate_error(in.sys, in.bath, 2), Error);
}

TEST(GateError, HaarMonteCarlo) {
  const testing::Instance in = random_instance(9);
  const OperatorBasis basis = generate_basis(2);
  // P is linear in Gamma: P(Gamma) = Re Tr[Gamma M] with M = sum_k w_k eps^dagger G eps.
  const std::vector<double> w = trapezoid_weights(in.bath.grid.size(), in.bath.grid.step);
  ComplexMatrix mm = ComplexMatrix::Zero(3, 3);
  for (std::size_t k = 0; k < in.bath.grid.size(); ++k) {
    mm += w[k] * in.sys.values[k].adjoint() * in.bath.spectrum[k] * in.sys.values[k];
  }
  std::mt19937_64 rng(99);
  const std::size_t samples = 100000;
  double acc = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const Eigen::VectorXcd psi = haar_state(2, rng);
    const Operator rho = psi * psi.adjoint();
    acc += (gamma_matrix(rho, rho, basis) * mm).trace().real();
  }
  const double mc = -acc / static_cast<double>(samples);
  EXPECT_LT(rel(mc, gate_error(in.sys, in.bath, 2)), 1e-2);
}

TEST(Property, GateErrorNonNegative) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const double t = 5.0;
    const ControlTrajectory traj = testing::random_euler(rng, t, 10, 1.0, 1.5);
    const BathModel bath = trial % 2 == 0 ? testing::random_lorentzian(rng, t, 100, 1.0)
                                          : testing::random_correlated_bath(rng, t, 100);
    const testing::Instance in = testing::make_instance(traj, bath, 100);
    EXPECT_GE(gate_error(in.sys, in.bath, 2), -1e-10);
  }
}

TEST(Bounds, ZeroGamma) {
  const testing::Instance in = random_instance(10);
  const ScoreBounds b = score_bounds(ComplexMatrix::Zero(3, 3), in.bath, in.t);
  EXPECT_EQ(b.lo, 0.0);
  EXPECT_EQ(b.hi, 0.0);
}

TEST(Bounds, QubitMixtureValue) {
  const testing::Instance in = random_instance(11);
  const double s = in.bath.sup_trace();
  const ScoreBounds b = score_bounds(testing::qubit_mixture_gamma(0.25, 2.0), in.bath, in.t);
  // Gamma eigenvalues {3, -1, 0}.
  EXPECT_NEAR(b.hi, 3.0 * in.t * s, 1e-12 * in.t * s);
  EXPECT_NEAR(b.lo, -1.0 * in.t * s, 1e-12 * in.t * s);
}

TEST(Property, BoundsContainScores) {
  for (std::uint64_t seed = 50; seed < 60; ++seed) {
    const testing::Instance in = random_instance(seed);
    for (double p : {0.0, 0.25, 0.45}) {
      const ComplexMatrix g = testing::qubit_mixture_gamma(p, 2.0);
      EXPECT_TRUE(score_bounds(g, in.bath, in.t).contains(score_spectral(in.sys, in.bath, g)));
    }
    const ComplexMatrix avg = averaged_gamma(2);
    EXPECT_TRUE(score_bounds(avg, in.bath, in.t).contains(score_spectral(in.sys, in.bath, avg)));
  }
}

TEST(NonCommuting, ReducesToCommutingScore) {
  const testing::Instance in = random_instance(12);
  const ComplexMatrix g = testing::qubit_mixture_gamma(0.25, 2.0);
  EXPECT_LT(rel(score_noncommuting(in.rot, in.corr, g), score_timedomain(in.rot, in.corr, g)), 1e-8);
}

TEST(NonCommuting, HermitianGammaHasNoCorrection) {
  // Any Hermitian Gamma, not necessarily from a state.
  const testing::Instance in = random_instance(13);
  ComplexMatrix g(3, 3);
  g << 0.3, cplx(0.1, 0.4), cplx(-0.2, 0.0), cplx(0.1, -0.4), -0.7, cplx(0.0, 0.5), cplx(-0.2, 0.0),
      cplx(0.0, -0.5), 0.2;
  EXPECT_LT(rel(score_noncommuting(in.rot, in.corr, g), score_timedomain(in.rot, in.corr, g)), 1e-8);
}

TEST(NonCommuting, MatchesDirectCausalSum) {
  const testing::Instance in = random_instance(14, 4.0, 60);
  ScoreExtras obs;
  obs.observable = pauli(1);
  const Operator rho = mixture_state(0.3);
  const ComplexMatrix g = gamma_matrix(rho, obs.observable, in.basis);
  const cplx want = testing::direct_double_sum(in.rot.eps, in.corr, g, in.grid.step(), true);
  EXPECT_LT(rel(score_noncommuting(in.rot, in.corr, g), 2.0 * want.real()), 1e-12);
}

TEST(Property, NonCommutingTimeAndSpectralAgree) {
  for (std::uint64_t seed = 70; seed < 75; ++seed) {
    const testing::Instance in = random_instance(seed);
    Operator rho(2, 2);
    rho << 0.6, cplx(0.2, 0.1), cplx(0.2, -0.1), 0.4;
    const ComplexMatrix g = gamma_matrix(rho, pauli(3) + 0.5 * pauli(1), in.basis);
    ASSERT_GT(max_abs(g - g.adjoint()), 1e-3);
    const auto causal = causal_spectrum(in.corr, in.bath.grid);
    EXPECT_LT(rel(score_noncommuting(in.rot, in.corr, g), score_noncommuting_spectral(in.sys, causal, g)),
              1e-5)
        << seed;
  }
}

TEST(Property, HermitianCausalPartReproducesScore) {
  const testing::Instance in = random_instance(15);
  const ComplexMatrix g = testing::qubit_mixture_gamma(0.25, 2.0);
  std::vector<ComplexMatrix> causal = causal_spectrum(in.corr, in.bath.grid);
  for (auto& c : causal) c = 0.5 * (c + c.adjoint()).eval();
  EXPECT_LT(rel(score_noncommuting_spectral(in.sys, causal, g), score_spectral(in.sys, in.bath, g)), 1e-5);
}

TEST(Quadratic, IncrementalDeltaMatchesFullEvaluation) {
  const testing::Instance in = random_instance(16);
  ScoreExtras obs;
  const ComplexMatrix g = gamma_matrix(mixture_state(0.3), pauli(1), in.basis);
  for (auto mode : {QuadraticOverlap::Mode::kFull, QuadraticOverlap::Mode::kCausal}) {
    QuadraticOverlap q(in.corr, in.grid, g, mode);
    q.set_base(in.rot.eps);
    EXPECT_LT(std::abs(q.base_value() - q.evaluate(in.rot.eps)), 1e-12 * std::abs(q.base_value()));
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss;
    const std::vector<std::size_t> idx{0, 17, 18, 19, 100};
    std::vector<RealMatrix> d;
    std::vector<RealMatrix> moved = in.rot.eps;
    for (std::size_t i : idx) {
      RealMatrix x(3, 3);
      for (int e = 0; e < 9; ++e) x.data()[e] = 0.01 * gauss(rng);
      d.push_back(x);
      moved[i] += x;
    }
    const cplx full = q.evaluate(moved) - q.evaluate(in.rot.eps);
    EXPECT_LT(std::abs(q.delta(idx, d) - full), 1e-10 * std::abs(full));
  }
}

TEST(Report, JsonFields) {
  ScoreReport r;
  r.p_time = 1.5;
  r.p_spectral = 1.5;
  r.time_steps = 100;
  std::stringstream ss;
  write_score_report(ss, r);
  const auto j = nlohmann::json::parse(ss.str());
  for (const char* key : {"p_time", "p_spectral", "p_tilde", "bound_lo", "bound_hi", "gate_error",
                          "commuting", "t", "time_steps", "omega_points", "omega_cutoff", "omega_step",
                          "kappa"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_TRUE(j["gate_error"].is_null());
  EXPECT_EQ(j["time_steps"].get<int>(), 100);
}

}  // namespace
}  // namespace overlap
