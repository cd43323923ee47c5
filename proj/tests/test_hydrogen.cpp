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


#include <cmath>
#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "cprlab/errors.hpp"
#include "cprlab/hydrogen_model.hpp"
#include "oracles.hpp"

namespace cprlab {
namespace {

void expect_integrals_match_quadrature(const StoBasis& b, double mass, double tol) {
  const RealMatrix s = overlap_matrix(b);
  const RealMatrix t = kinetic_matrix(b, mass);
  const RealMatrix v = potential_matrix(b);
  for (int i = 0; i < b.size(); ++i) {
    for (int j = 0; j < b.size(); ++j) {
      const double ai = b.exponents[i], aj = b.exponents[j];
      EXPECT_NEAR(s(i, j), oracle::overlap(ai, aj), tol) << b.name << " S(" << i << "," << j << ")";
      EXPECT_NEAR(t(i, j), oracle::kinetic(ai, aj, mass), tol) << b.name << " T(" << i << "," << j << ")";
      EXPECT_NEAR(v(i, j), oracle::potential(ai, aj), tol) << b.name << " V(" << i << "," << j << ")";
    }
  }
}

TEST(Integrals, Sto2gAgainstQuadrature) {
  expect_integrals_match_quadrature(StoBasis::sto2g(), 1.0, 1e-10);
}

TEST(Integrals, Sto3gAgainstQuadrature) {
  expect_integrals_match_quadrature(StoBasis::sto3g(), 1.0, 1e-10);
  expect_integrals_match_quadrature(StoBasis::sto3g(), 1.45, 1e-10);
}

TEST(Integrals, RandomBasesAgainstQuadrature) {
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> expo(0.05, 5.0), coef(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    StoBasis b{"random", {}, {}};
    const int k = 2 + trial % 2;
    for (int i = 0; i < k; ++i) {
      b.exponents.push_back(expo(rng));
      b.coefficients.push_back(coef(rng));
    }
    expect_integrals_match_quadrature(b, 0.5 + 0.1 * trial, 1e-8);
  }
}

TEST(Integrals, NormalizedPrimitivesHaveUnitOverlapDiagonal) {
  for (const auto& b : {StoBasis::sto2g(), StoBasis::sto3g()}) {
    const RealMatrix s = overlap_matrix(b);
    for (int i = 0; i < b.size(); ++i) EXPECT_NEAR(s(i, i), 1.0, 1e-15);
    EXPECT_LT((s - s.transpose()).cwiseAbs().maxCoeff(), 1e-16);
  }
}

TEST(HydrogenModel, GroundStateEnergiesAreVariational) {
  const double e2 = build_model(StoBasis::sto2g(), 1.0).ground_state_energy();
  const double e3 = build_model(StoBasis::sto3g(), 1.0).ground_state_energy();
  EXPECT_GT(e2, -0.5);
  EXPECT_LT(e2, -0.4);
  EXPECT_LT(e3, e2);
  EXPECT_GT(e3, -0.5);
}

TEST(HydrogenModel, LoewdinSpectrumEqualsGeneralizedProblem) {
  for (const auto& b : {StoBasis::sto2g(), StoBasis::sto3g()}) {
    for (double m : {0.7, 1.0, 1.9}) {
      const HydrogenModel model = build_model(b, m);
      const RealMatrix h = kinetic_matrix(b, m) + potential_matrix(b);
      const RealVector ref = oracle::generalized_eigenvalues(h, overlap_matrix(b));
      const RealVector got = hermitian_eig(model.h_ortho).values;
      EXPECT_LT((got - ref).cwiseAbs().maxCoeff(), 1e-12) << b.name << " m=" << m;
    }
  }
}

TEST(HydrogenModel, OrthogonalizerInvertsOverlap) {
  const HydrogenModel m = build_model(StoBasis::sto3g(), 1.0);
  const RealMatrix id = m.overlap_inv_sqrt * m.overlap * m.overlap_inv_sqrt;
  EXPECT_LT((id - RealMatrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_TRUE(is_hermitian(m.h_ortho, 0.0));
}

TEST(HydrogenModel, GroundEnergyDecreasesWithMass) {
  double previous = 0.0;
  for (int i = 0; i <= 12; ++i) {
    const double e = build_model(StoBasis::sto2g(), 0.7 + 0.1 * i).ground_state_energy();
    if (i > 0) EXPECT_LT(e, previous);
    previous = e;
  }
}

TEST(HydrogenModel, ContractionStateIsNormalizedAndNearGround) {
  for (const auto& b : {StoBasis::sto2g(), StoBasis::sto3g()}) {
    const HydrogenModel m = build_model(b, 1.0);
    const ComplexVector psi = m.contraction_state();
    EXPECT_NEAR(psi.norm(), 1.0, 1e-14);
    const ComplexVector ground = hermitian_eig(m.h_ortho).vectors.col(0);
    EXPECT_GT(std::norm(ground.dot(psi)), 0.95);
  }
}

TEST(HydrogenModel, PropagatorIsUnitaryAndComposes) {
  const HydrogenModel m = build_model(StoBasis::sto2g(), 1.0);
  for (double dt : {0.5, 1.31, 2.7, 3.5}) EXPECT_TRUE(is_unitary(target_propagator(m, dt), 1e-12));
  const ComplexMatrix lhs = target_propagator(m, 1.0) * target_propagator(m, 0.5);
  EXPECT_LT(max_abs(lhs - target_propagator(m, 1.5)), 1e-10);
  EXPECT_LT(max_abs(target_propagator(m, 0.0) - ComplexMatrix::Identity(2, 2)), 1e-14);
}

TEST(HydrogenModel, RejectsInvalidInput) {
  EXPECT_THROW(build_model(StoBasis::sto2g(), 0.0), ValidationError);
  EXPECT_THROW(build_model(StoBasis::sto2g(), -1.0), ValidationError);
  EXPECT_THROW(build_model(StoBasis::sto2g(), NAN), ValidationError);
  EXPECT_THROW(build_model({"k1", {1.0}, {1.0}}, 1.0), ValidationError);
  EXPECT_THROW(build_model({"k4", {1, 1, 1, 1}, {1, 2, 3, 4}}, 1.0), ValidationError);
  EXPECT_THROW(build_model({"neg", {1, 1}, {1, -2}}, 1.0), ValidationError);
  EXPECT_THROW(build_model({"sizes", {1}, {1, 2}}, 1.0), ValidationError);
  EXPECT_THROW(StoBasis::by_name("sto-6g"), ValidationError);
}

TEST(HydrogenModel, CoincidentExponentsAreSingular) {
  EXPECT_THROW(build_model({"dup", {0.5, 0.5}, {1.0, 1.0}}, 1.0), NumericalError);
}

TEST(StoBasis, JsonRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "cprlab_basis_roundtrip.json";
  const StoBasis b = StoBasis::sto3g();
  b.save_json(path);
  const StoBasis back = StoBasis::by_name(path.string());
  EXPECT_EQ(back.coefficients, b.coefficients);
  EXPECT_EQ(back.exponents, b.exponents);
  std::filesystem::remove(path);
}

TEST(StoBasis, ShippedDefaultMatchesBuiltin) {
  const StoBasis b = StoBasis::load_json(std::filesystem::path(CPRLAB_DATA_DIR) / "sto-2g.json");
  EXPECT_EQ(b.coefficients, StoBasis::sto2g().coefficients);
  EXPECT_EQ(b.exponents, StoBasis::sto2g().exponents);
}

}  // namespace
}  // namespace cprlab
