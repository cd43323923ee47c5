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

#include "cprlab/quantum_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "cprlab/errors.hpp"

namespace cprlab {

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool is_finite(const ComplexMatrix& m) {
  return m.allFinite();
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m - m.adjoint()) <= tol;
}

bool is_unitary(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const auto id = ComplexMatrix::Identity(m.rows(), m.cols());
  return max_abs(m.adjoint() * m - id) <= tol;
}

EigenSystem hermitian_eig(const HermitianMatrix& h) {
  if (h.rows() != h.cols() || h.rows() == 0) {
    throw ValidationError("hermitian_eig: matrix must be square and non-empty");
  }
  if (!is_finite(h)) {
    throw ValidationError("hermitian_eig: matrix has non-finite entries");
  }
  // Scale-aware check: large Hamiltonians carry proportionally larger roundoff.
  const double scale = std::max(1.0, max_abs(h));
  if (!is_hermitian(h, kHermitianTol * scale)) {
    throw ValidationError("hermitian_eig: matrix is not Hermitian (max |H - H^dagger| = " +
                          std::to_string(max_abs(h - h.adjoint())) + ")");
  }

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("hermitian_eig: eigensolver did not converge");
  }
  EigenSystem out{solver.eigenvalues(), solver.eigenvectors()};

  const ComplexMatrix rebuilt =
      out.vectors * out.values.cast<Complex>().asDiagonal() * out.vectors.adjoint();
  const double residual = max_abs(rebuilt - 0.5 * (h + h.adjoint()));
  if (residual > 1e-10 * scale) {
    throw NumericalError("hermitian_eig: reconstruction residual " + std::to_string(residual));
  }
  return out;
}

UnitaryMatrix expm_neg_i(const EigenSystem& eig, double scale) {
  const Eigen::Index n = eig.values.size();
  ComplexVector phases(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    phases(k) = std::polar(1.0, -scale * eig.values(k));
  }
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

UnitaryMatrix expm_neg_i(const HermitianMatrix& h, double scale) {
  if (!std::isfinite(scale)) {
    throw ValidationError("expm_neg_i: scale must be finite");
  }
  return expm_neg_i(hermitian_eig(h), scale);
}

Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols() || a.rows() == 0) {
    throw ValidationError("hs_inner: dimension mismatch");
  }
  // Tr(A^dagger B) = sum_ij conj(A_ij) B_ij
  return a.conjugate().cwiseProduct(b).sum() / static_cast<double>(a.rows());
}

double fidelity(const UnitaryMatrix& target, const UnitaryMatrix& actual) {
  const Complex overlap = hs_inner(target, actual);
  return std::clamp(std::norm(overlap), 0.0, 1.0);
}

}  // namespace cprlab
