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

#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "overlap/operator_algebra.hpp"

namespace overlap {
namespace {

const cplx kI(0.0, 1.0);

ComplexMatrix random_complex(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> normal;
  ComplexMatrix a(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) a(r, c) = cplx(normal(rng), normal(rng));
  return a;
}

TEST(Basis, QubitIsPauli) {
  const OperatorBasis b = generate_basis(2);
  ASSERT_EQ(b.size(), 3u);
  for (int j = 1; j <= 3; ++j) EXPECT_LT(max_abs(b[j - 1] - pauli(j)), 1e-15) << j;
}

TEST(Basis, QubitSpectrum) {
  for (const Operator& s : generate_basis(2).ops) {
    EXPECT_LT(std::abs(s.trace()), 1e-15);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(s);
    EXPECT_NEAR(es.eigenvalues()(0), -1.0, 1e-14);
    EXPECT_NEAR(es.eigenvalues()(1), 1.0, 1e-14);
  }
}

TEST(Basis, GramIsScaledIdentity) {
  for (int d : {2, 3, 4, 5}) {
    const OperatorBasis b = generate_basis(d);
    ASSERT_EQ(b.size(), static_cast<std::size_t>(d * d - 1));
    for (std::size_t j = 0; j < b.size(); ++j) {
      EXPECT_TRUE(is_hermitian(b[j]));
      EXPECT_LT(std::abs(b[j].trace()), 1e-12);
      for (std::size_t k = 0; k < b.size(); ++k) {
        const double want = j == k ? d : 0.0;
        EXPECT_LT(std::abs((b[j] * b[k]).trace() - want), 1e-10) << d << " " << j << " " << k;
      }
    }
  }
}

TEST(Basis, OrderingForQutrit) {
  // Symmetric pairs, antisymmetric pairs, then diagonals.
  const OperatorBasis b = generate_basis(3);
  const double s = std::sqrt(1.5);
  EXPECT_NEAR(b[0](0, 1).real(), s, 1e-14);
  EXPECT_NEAR(b[1](0, 2).real(), s, 1e-14);
  EXPECT_NEAR(b[2](1, 2).real(), s, 1e-14);
  EXPECT_NEAR(b[3](0, 1).imag(), -s, 1e-14);
  EXPECT_NEAR(b[6](0, 0).real(), s, 1e-14);
  EXPECT_NEAR(b[6](1, 1).real(), -s, 1e-14);
  EXPECT_NEAR(b[7](2, 2).real(), -2.0 * s / std::sqrt(3.0), 1e-14);
}

TEST(Basis, RejectsSmallDimension) {
  EXPECT_THROW(generate_basis(1), Error);
  try {
    generate_basis(0);
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kDimension);
  }
}

TEST(Commutator, PauliAlgebra) {
  EXPECT_LT(max_abs(commutator(pauli(1), pauli(2)) - 2.0 * kI * pauli(3)), 1e-15);
  EXPECT_LT(max_abs(commutator(pauli(1), pauli(3)) + 2.0 * kI * pauli(2)), 1e-15);
  std::mt19937_64 rng(1);
  const ComplexMatrix a = random_complex(rng, 3);
  EXPECT_EQ(max_abs(commutator(a, a)), 0.0);
  EXPECT_THROW(commutator(pauli(1), ComplexMatrix::Identity(3, 3)), Error);
}

TEST(HermitianSplit, Cases) {
  const HermitianParts h = hermitian_split(pauli(1));
  EXPECT_EQ(max_abs(h.plus - pauli(1)), 0.0);
  EXPECT_EQ(max_abs(h.minus), 0.0);
  const HermitianParts s = hermitian_split(kI * pauli(1));
  EXPECT_EQ(max_abs(s.plus), 0.0);
  EXPECT_EQ(max_abs(s.minus - kI * pauli(1)), 0.0);
  std::mt19937_64 rng(2);
  const ComplexMatrix a = random_complex(rng, 3);
  const HermitianParts r = hermitian_split(a);
  EXPECT_LT(max_abs(r.plus - r.plus.adjoint()), 1e-15);
  EXPECT_LT(max_abs(r.minus + r.minus.adjoint()), 1e-15);
  EXPECT_LT(max_abs(r.plus + r.minus - a), 1e-14);
  EXPECT_THROW(hermitian_split(ComplexMatrix::Zero(2, 3)), Error);
}

TEST(PsdSplit, Diagonal) {
  ComplexMatrix g = ComplexMatrix::Zero(2, 2);
  g(0, 0) = 2.0;
  g(1, 1) = -1.0;
  const PsdParts p = psd_split(g);
  EXPECT_NEAR(p.positive(0, 0).real(), 2.0, 1e-14);
  EXPECT_NEAR(std::abs(p.positive(1, 1)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(p.negative(0, 0)), 0.0, 1e-14);
  EXPECT_NEAR(p.negative(1, 1).real(), 1.0, 1e-14);
}

TEST(PsdSplit, PsdInputIsKept) {
  std::mt19937_64 rng(3);
  const ComplexMatrix a = random_complex(rng, 3);
  const ComplexMatrix g = a * a.adjoint();
  const PsdParts p = psd_split(g);
  EXPECT_LT(max_abs(p.positive - g), 1e-12);
  EXPECT_LT(max_abs(p.negative), 1e-12);
}

TEST(PsdSplit, QubitMixtureGamma) {
  // Gamma for p = 0.25 and P = -4 rho0 from the Pauli-product oracle.
  const ComplexMatrix gamma = testing::qubit_mixture_gamma(0.25, 2.0);
  EXPECT_NEAR(gamma(0, 1).imag(), 2.0, 1e-15);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(gamma);
  // Frozen from the oracle: eigenvalues {-1, 0, 3}.
  EXPECT_NEAR(es.eigenvalues()(0), -1.0, 1e-12);
  EXPECT_NEAR(es.eigenvalues()(1), 0.0, 1e-12);
  EXPECT_NEAR(es.eigenvalues()(2), 3.0, 1e-12);
  const PsdParts p = psd_split(gamma);
  EXPECT_NEAR(p.positive.trace().real(), 3.0, 1e-12);
  EXPECT_NEAR(p.negative.trace().real(), 1.0, 1e-12);
}

TEST(PsdSplit, RejectsNonHermitian) {
  EXPECT_THROW(psd_split(kI * pauli(0)), Error);
}

TEST(Property, PsdSplitPartsAreFeasible) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 4;
    const ComplexMatrix a = random_complex(rng, n);
    const ComplexMatrix g = 0.5 * (a + a.adjoint());
    const PsdParts p = psd_split(g);
    EXPECT_GE(min_eigenvalue(p.positive), -1e-10);
    EXPECT_GE(min_eigenvalue(p.negative), -1e-10);
    EXPECT_LT(max_abs(p.positive - p.negative - g), 1e-10);
  }
}

TEST(Property, ExpandReconstructRoundTrip) {
  std::mt19937_64 rng(5);
  for (int d : {2, 3, 4}) {
    const OperatorBasis b = generate_basis(d);
    for (int trial = 0; trial < 10; ++trial) {
      const ComplexMatrix a = random_complex(rng, d);
      ComplexMatrix h = 0.5 * (a + a.adjoint());
      h -= (h.trace() / static_cast<double>(d)) * ComplexMatrix::Identity(d, d);
      const Eigen::VectorXcd c = expand(h, b);
      EXPECT_LT(c.imag().cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_LT(max_abs(reconstruct(c, b) - h), 1e-10);
    }
  }
}

TEST(UnitaryExponential, HalfTurn) {
  const Operator u = unitary_exponential(pauli(2), kPi / 2.0);
  EXPECT_LT(max_abs(u + kI * pauli(2)), 1e-14);
}

}  // namespace
}  // namespace overlap
