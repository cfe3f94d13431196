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

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace overlap {

using cplx = std::complex<double>;

/// Dense complex d x d matrix. Hamiltonians, coupling factors, gradient
/// operators and density matrices are all carried by this one type.
using Operator = Eigen::MatrixXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Failure categories. The CLI maps these onto exit codes.
enum class ErrorCategory {
  kInvalidArgument,
  kDimension,
  kResolution,
  kValidation,
  kConfig,
  kRuntime,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

[[noreturn]] inline void fail(ErrorCategory category, const std::string& what) {
  throw Error(category, what);
}

/// Every numerical tolerance used by validity checks, in one place.
struct Tolerances {
  double hermitian = 1e-12;       // relative to max |A|
  double trace = 1e-12;           // basis tracelessness, state normalization
  double gram = 1e-10;            // Tr(S_j S_k) = d delta_jk
  double psd = 1e-10;             // eigenvalue floor, relative to max |G|
  double commuting = 1e-10;       // ||[rho0, P]||_max
  double imaginary_residue = 1e-8;
  double rotation_imaginary = 1e-10;
  double orthogonality = 1e-8;
  double unitarity = 1e-10;
  double window_decay = 1e-3;     // |Phi(+-T)| / |Phi(0)|
};

inline const Tolerances& default_tolerances() {
  static const Tolerances tolerances{};
  return tolerances;
}

}  // namespace overlap
