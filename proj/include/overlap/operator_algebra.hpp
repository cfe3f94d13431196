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

#pragma once

#include <utility>
#include <vector>

#include "overlap/common.hpp"

namespace overlap {

/// Traceless Hermitian operator basis S_1 .. S_{d^2-1} normalized to
/// Tr(S_j S_k) = d delta_jk.
///
/// Ordering is fixed: symmetric off-diagonal pairs (m < n, row-major),
/// antisymmetric pairs in the same order, then the diagonal generators.
/// For d = 2 this is (sigma_1, sigma_2, sigma_3).
struct OperatorBasis {
  int dim = 0;
  std::vector<Operator> ops;

  std::size_t size() const { return ops.size(); }
  const Operator& operator[](std::size_t j) const { return ops[j]; }
};

OperatorBasis generate_basis(int d);

/// Pauli matrix sigma_j for j in {1, 2, 3}; j = 0 gives the identity.
Operator pauli(int j);

Operator commutator(const Operator& a, const Operator& b);

double max_abs(const ComplexMatrix& a);

bool is_hermitian(const ComplexMatrix& a,
                  const Tolerances& tol = default_tolerances());

/// (A + A^dagger)/2 and (A - A^dagger)/2.
struct HermitianParts {
  ComplexMatrix plus;
  ComplexMatrix minus;
};
HermitianParts hermitian_split(const ComplexMatrix& a);

/// G = positive - negative with both parts positive semi-definite.
struct PsdParts {
  ComplexMatrix positive;
  ComplexMatrix negative;
};
PsdParts psd_split(const ComplexMatrix& g,
                   const Tolerances& tol = default_tolerances());

/// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const ComplexMatrix& g);

/// Coefficients c_j = Tr(A S_j) / d. Real for Hermitian A.
Eigen::VectorXcd expand(const Operator& a, const OperatorBasis& basis);
Operator reconstruct(const Eigen::VectorXcd& coefficients,
                     const OperatorBasis& basis);

/// exp(-i H s) for Hermitian H.
Operator unitary_exponential(const Operator& h, double s);

}  // namespace overlap
