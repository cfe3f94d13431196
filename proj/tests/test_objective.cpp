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

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "overlap/objective.hpp"

namespace overlap {
namespace {

TEST(FiniteDiff, QuadraticAtOriginIsZero) {
  const Vector x = Vector::Zero(6);
  const Vector g = finite_diff_gradient([](const Vector& v) { return v.squaredNorm(); }, x, 1e-3,
                                        std::vector<bool>(6, true));
  EXPECT_EQ(g.cwiseAbs().maxCoeff(), 0.0);
}

TEST(FiniteDiff, LinearIsExactAndMasked) {
  Vector c(4);
  c << 1.5, -2.0, 0.25, 3.0;
  const Vector x = Vector::LinSpaced(4, -1.0, 1.0);
  const Vector g = finite_diff_gradient([&](const Vector& v) { return c.dot(v); }, x, 0.5,
                                        {true, true, false, true});
  EXPECT_NEAR(g(0), 1.5, 1e-14);
  EXPECT_NEAR(g(1), -2.0, 1e-14);
  EXPECT_EQ(g(2), 0.0);
  EXPECT_NEAR(g(3), 3.0, 1e-14);
}

TEST(FiniteDiff, RejectsBadArguments) {
  auto f = [](const Vector& v) { return v.sum(); };
  EXPECT_THROW(finite_diff_gradient(f, Vector::Zero(2), 0.0, {true, true}), Error);
  EXPECT_THROW(finite_diff_gradient(f, Vector::Zero(2), 1e-3, {true}), Error);
}

TEST(Energy, ObjectiveMatchesControlEnergy) {
  std::mt19937_64 rng(3);
  const ControlTrajectory traj = testing::random_euler(rng, 4.0, 10, 1.0, 0.7);
  const Operator h0 = 0.5 * pauli(3);
  EnergyObjective e(EnergyKind::kModulation, h0);
  EXPECT_EQ(e.value(traj), control_energy(traj, EnergyKind::kModulation, h0));
  const Vector g = e.gradient(traj, 1e-5);
  // Pinned first knot.
  EXPECT_EQ(g.head(3).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT(g.cwiseAbs().maxCoeff(), 0.0);
}

struct Case {
  testing::Instance in;
  ComplexMatrix gamma;
};

Case make_case(std::uint64_t seed, double p) {
  std::mt19937_64 rng(seed);
  const double t = 5.0;
  const std::size_t m = 100;
  const ControlTrajectory traj = testing::random_euler(rng, t, 10, 2.0 * kPi / t, 0.8);
  return {testing::make_instance(traj, testing::random_lorentzian(rng, t, m, 1.0), m),
          testing::qubit_mixture_gamma(p, 2.0)};
}

TEST(Overlap, ValueMatchesScore) {
  const Case s = make_case(1, 0.25);
  OverlapObjective obj(s.in.basis, s.in.corr, s.in.t, 100, s.gamma, QuadraticOverlap::Mode::kFull);
  const double want = score_timedomain(s.in.rot, s.in.corr, s.gamma);
  EXPECT_NEAR(obj.value(s.in.traj), want, 1e-12 * std::abs(want));
  OverlapObjective causal(s.in.basis, s.in.corr, s.in.t, 100, s.gamma, QuadraticOverlap::Mode::kCausal, -1.0);
  EXPECT_NEAR(causal.value(s.in.traj), -want, 1e-8 * std::abs(want));
}

TEST(Overlap, RotationMatrixMatchesRotationPath) {
  const Case s = make_case(2, 0.25);
  OverlapObjective obj(s.in.basis, s.in.corr, s.in.t, 100, s.gamma, QuadraticOverlap::Mode::kFull);
  const auto eps = obj.eps_path(s.in.traj);
  for (std::size_t i = 0; i < eps.size(); ++i) {
    EXPECT_LT((eps[i] - s.in.rot.eps[i]).cwiseAbs().maxCoeff(), 1e-14);
  }
}

void expect_gradient_matches_oracle(OverlapObjective& obj, const ControlTrajectory& traj) {
  const Vector g = obj.gradient(traj, 1e-5);
  ControlTrajectory work = traj;
  const Vector want = testing::five_point_gradient(
      [&](const Vector& x) {
        work.assign(x);
        return obj.value(work);
      },
      traj.flatten(), 1e-3, traj.free_mask());
  const double scale = want.cwiseAbs().maxCoeff();
  ASSERT_GT(scale, 0.0);
  EXPECT_LT((g - want).cwiseAbs().maxCoeff(), 1e-4 * scale);
}

TEST(Overlap, IncrementalGradientMatchesFivePointOracle) {
  for (std::uint64_t seed : {3, 4, 5}) {
    const Case s = make_case(seed, 0.25);
    OverlapObjective obj(s.in.basis, s.in.corr, s.in.t, 100, s.gamma, QuadraticOverlap::Mode::kFull);
    expect_gradient_matches_oracle(obj, s.in.traj);
  }
}

TEST(Overlap, CausalGradientMatchesFivePointOracle) {
  const Case s = make_case(6, 0.25);
  const ComplexMatrix g = gamma_matrix(mixture_state(0.3), pauli(1), s.in.basis);
  OverlapObjective obj(s.in.basis, s.in.corr, s.in.t, 100, g, QuadraticOverlap::Mode::kCausal);
  expect_gradient_matches_oracle(obj, s.in.traj);
}

TEST(Overlap, PinnedEndGetsZeroGradient) {
  const Case s = make_case(7, 0.25);
  ControlTrajectory traj = s.in.traj;
  traj.pin_end = true;
  OverlapObjective obj(s.in.basis, s.in.corr, s.in.t, 100, s.gamma, QuadraticOverlap::Mode::kFull);
  const Vector g = obj.gradient(traj, 1e-5);
  EXPECT_EQ(g.head(3).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(g.tail(3).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Overlap, HamiltonianGradientMatchesFivePointOracle) {
  std::mt19937_64 rng(8);
  const double t = 4.0;
  const std::size_t m = 80;
  ControlTrajectory traj = ControlTrajectory::zeros(t, 6, 2);
  traj.kind = Parametrization::kHamiltonian;
  std::normal_distribution<double> gauss;
  for (Eigen::Index k = 1; k < traj.f.rows(); ++k)
    for (Eigen::Index c = 0; c < 3; ++c) traj.f(k, c) = gauss(rng);
  const BathModel bath = testing::random_lorentzian(rng, t, m, 1.0);
  const CorrelationPath corr = correlation_from_spectrum(bath);
  const OperatorBasis basis = generate_basis(2);
  OverlapObjective obj(basis, corr, t, m, testing::qubit_mixture_gamma(0.25, 2.0),
                       QuadraticOverlap::Mode::kFull);
  expect_gradient_matches_oracle(obj, traj);
}

TEST(Overlap, CountsBoundViolations) {
  const Case s = make_case(9, 0.25);
  OverlapObjective obj(s.in.basis, s.in.corr, s.in.t, 100, s.gamma, QuadraticOverlap::Mode::kFull);
  obj.set_bounds(score_bounds(s.gamma, s.in.bath, s.in.t));
  obj.value(s.in.traj);
  obj.gradient(s.in.traj, 1e-5);
  EXPECT_GT(obj.evaluations(), 1u);
  EXPECT_EQ(obj.bound_violations(), 0u);
  obj.set_bounds(ScoreBounds{0.0, 0.0});
  obj.value(s.in.traj);
  EXPECT_EQ(obj.bound_violations(), 1u);
}

}  // namespace
}  // namespace overlap
