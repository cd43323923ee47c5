// Copyright 2026 The cprlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>

#include <Eigen/Dense>

namespace cprlab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Hermitian and unitary matrices share the dense representation; the
// aliases document intent and the checks below enforce the invariants.
using HermitianMatrix = ComplexMatrix;
using UnitaryMatrix = ComplexMatrix;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-10;

double max_abs(const ComplexMatrix& m);
bool is_finite(const ComplexMatrix& m);
bool is_hermitian(const ComplexMatrix& m, double tol = kHermitianTol);
bool is_unitary(const ComplexMatrix& m, double tol = kUnitaryTol);

struct EigenSystem {
  RealVector values;     // ascending
  UnitaryMatrix vectors; // columns are eigenvectors
};

/// Eigendecomposition of a Hermitian matrix, H = V diag(values) V^dagger.
/// Throws ValidationError for non-square, non-finite or non-Hermitian input and
/// NumericalError (with the reconstruction residual) if the solver fails.
EigenSystem hermitian_eig(const HermitianMatrix& h);

/// exp(-i * scale * H) through the eigendecomposition of H.
UnitaryMatrix expm_neg_i(const HermitianMatrix& h, double scale);
UnitaryMatrix expm_neg_i(const EigenSystem& eig, double scale);

/// Tr(A^dagger B) / dim.
Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b);

/// |Tr(U_target^dagger U_actual)|^2 / dim^2, in [0, 1] and blind to global phase.
double fidelity(const UnitaryMatrix& target, const UnitaryMatrix& actual);

}  // namespace cprlab
