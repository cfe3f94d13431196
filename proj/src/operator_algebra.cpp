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

#include "overlap/operator_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace overlap {

OperatorBasis generate_basis(int d) {
  if (d < 2) {
    fail(ErrorCategory::kDimension,
         "generate_basis: dimension must be >= 2, got " + std::to_string(d));
  }
  OperatorBasis basis;
  basis.dim = d;
  basis.ops.reserve(static_cast<std::size_t>(d * d - 1));

  // Gell-Mann matrices have Tr(l_j l_k) = 2 delta_jk; rescale to d.
  const double scale = std::sqrt(0.5 * d);
  const cplx i(0.0, 1.0);

  for (int m = 0; m < d; ++m) {
    for (int n = m + 1; n < d; ++n) {
      Operator s = Operator::Zero(d, d);
      s(m, n) = scale;
      s(n, m) = scale;
      basis.ops.push_back(std::move(s));
    }
  }
  for (int m = 0; m < d; ++m) {
    for (int n = m + 1; n < d; ++n) {
      Operator s = Operator::Zero(d, d);
      s(m, n) = -i * scale;
      s(n, m) = i * scale;
      basis.ops.push_back(std::move(s));
    }
  }
  for (int l = 1; l < d; ++l) {
    Operator s = Operator::Zero(d, d);
    const double norm = scale * std::sqrt(2.0 / (l * (l + 1.0)));
    for (int k = 0; k < l; ++k) s(k, k) = norm;
    s(l, l) = -l * norm;
    basis.ops.push_back(std::move(s));
  }
  return basis;
}

Operator pauli(int j) {
  Operator s = Operator::Zero(2, 2);
  const cplx i(0.0, 1.0);
  switch (j) {
    case 0:
      s(0, 0) = 1.0;
      s(1, 1) = 1.0;
      break;
    case 1:
      s(0, 1) = 1.0;
      s(1, 0) = 1.0;
      break;
    case 2:
      s(0, 1) = -i;
      s(1, 0) = i;
      break;
    case 3:
      s(0, 0) = 1.0;
      s(1, 1) = -1.0;
      break;
    default:
      fail(ErrorCategory::kInvalidArgument, "pauli: index must be 0..3");
  }
  return s;
}

Operator commutator(const Operator& a, const Operator& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    fail(ErrorCategory::kDimension, "commutator: dimension mismatch");
  }
  return a * b - b * a;
}

double max_abs(const ComplexMatrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& a, const Tolerances& tol) {
  if (a.rows() != a.cols()) return false;
  const ComplexMatrix diff = a - a.adjoint();
  return max_abs(diff) <= tol.hermitian * max_abs(a);
}

HermitianParts hermitian_split(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) {
    fail(ErrorCategory::kDimension, "hermitian_split: matrix is not square");
  }
  const ComplexMatrix adj = a.adjoint();
  HermitianParts parts;
  parts.plus = 0.5 * (a + adj);
  parts.minus = a - parts.plus;
  return parts;
}

PsdParts psd_split(const ComplexMatrix& g, const Tolerances& tol) {
  if (g.rows() != g.cols()) {
    fail(ErrorCategory::kDimension, "psd_split: matrix is not square");
  }
  // Eigenvalue-resolved splitting loses ~1e-15 relative accuracy, so
  // accept mild non-Hermiticity from upstream quadrature.
  const double scale = max_abs(g);
  if (max_abs(g - g.adjoint()) > std::max(tol.psd, tol.hermitian) * scale) {
    fail(ErrorCategory::kValidation, "psd_split: input is not Hermitian");
  }
  const ComplexMatrix herm = 0.5 * (g + g.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm);
  const auto& values = solver.eigenvalues();
  const auto& vectors = solver.eigenvectors();
  const auto n = g.rows();
  PsdParts parts{ComplexMatrix::Zero(n, n), ComplexMatrix::Zero(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const ComplexMatrix proj = vectors.col(k) * vectors.col(k).adjoint();
    if (values(k) >= 0.0) {
      parts.positive += values(k) * proj;
    } else {
      parts.negative -= values(k) * proj;
    }
  }
  return parts;
}

double min_eigenvalue(const ComplexMatrix& g) {
  const ComplexMatrix herm = 0.5 * (g + g.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm,
                                                      Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

Eigen::VectorXcd expand(const Operator& a, const OperatorBasis& basis) {
  if (a.rows() != basis.dim || a.cols() != basis.dim) {
    fail(ErrorCategory::kDimension, "expand: operator/basis mismatch");
  }
  Eigen::VectorXcd c(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j) {
    c(static_cast<Eigen::Index>(j)) = (a * basis[j]).trace() /
                                      static_cast<double>(basis.dim);
  }
  return c;
}

Operator reconstruct(const Eigen::VectorXcd& coefficients,
                     const OperatorBasis& basis) {
  if (static_cast<std::size_t>(coefficients.size()) != basis.size()) {
    fail(ErrorCategory::kDimension, "reconstruct: coefficient count mismatch");
  }
  Operator a = Operator::Zero(basis.dim, basis.dim);
  for (std::size_t j = 0; j < basis.size(); ++j) {
    a += coefficients(static_cast<Eigen::Index>(j)) * basis[j];
  }
  return a;
}

Operator unitary_exponential(const Operator& h, double s) {
  const ComplexMatrix herm = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm);
  const auto& v = solver.eigenvectors();
  Eigen::VectorXcd phases(herm.rows());
  for (Eigen::Index k = 0; k < herm.rows(); ++k) {
    phases(k) = std::polar(1.0, -s * solver.eigenvalues()(k));
  }
  return v * phases.asDiagonal() * v.adjoint();
}

}  // namespace overlap
