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

// Independent reference computations used only by the test suites. Nothing here
// calls into the library code paths it is used to check.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace cprlab::oracle {

// exp(A) for a general complex matrix by scaling and squaring a Taylor series.
inline Eigen::MatrixXcd expm_scaling_squaring(const Eigen::MatrixXcd& a) {
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.25) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.25)));
  const Eigen::MatrixXcd scaled = a / std::pow(2.0, squarings);
  Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(a.rows(), a.cols());
  Eigen::MatrixXcd sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = term * scaled / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

inline Eigen::MatrixXcd random_hermitian(int dim, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Eigen::MatrixXcd m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = {n(rng), n(rng)};
  return 0.5 * (m + m.adjoint());
}

// Normalized s-Gaussian and the pieces needed to apply the radial operators to it.
inline double gaussian(double alpha, double r) {
  return std::pow(2.0 * alpha / std::numbers::pi, 0.75) * std::exp(-alpha * r * r);
}

inline double radial_integral(auto&& integrand) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-14);
}

inline double overlap(double ai, double aj) {
  return radial_integral(
      [&](double r) { return 4.0 * std::numbers::pi * r * r * gaussian(ai, r) * gaussian(aj, r); });
}

// <chi_i| -1/(2m) (d^2/dr^2 + 2/r d/dr) |chi_j>, derivatives of chi_j taken by hand.
inline double kinetic(double ai, double aj, double mass) {
  return radial_integral([&](double r) {
    const double g = gaussian(aj, r);
    const double d1 = -2.0 * aj * r * g;
    const double d2 = (4.0 * aj * aj * r * r - 2.0 * aj) * g;
    const double lap = d2 + (r > 0.0 ? 2.0 * d1 / r : -4.0 * aj * g);
    return 4.0 * std::numbers::pi * r * r * gaussian(ai, r) * (-0.5 / mass) * lap;
  });
}

inline double potential(double ai, double aj) {
  return radial_integral(
      [&](double r) { return -4.0 * std::numbers::pi * r * gaussian(ai, r) * gaussian(aj, r); });
}

// Generalized symmetric-definite eigenvalues of (H, S) through a Cholesky
// reduction, independent of the Loewdin route.
inline Eigen::VectorXd generalized_eigenvalues(const Eigen::MatrixXd& h, const Eigen::MatrixXd& s) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(h, s);
  return es.eigenvalues();
}

}  // namespace cprlab::oracle
