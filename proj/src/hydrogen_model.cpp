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

#include "cprlab/hydrogen_model.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "cprlab/errors.hpp"

namespace cprlab {

void StoBasis::validate() const {
  const auto k = exponents.size();
  if (k < 2 || k > 3) {
    throw ValidationError("basis '" + name + "': only K = 2 or K = 3 primitives are supported");
  }
  if (coefficients.size() != k) {
    throw ValidationError("basis '" + name + "': A and alpha must have the same length");
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (!std::isfinite(coefficients[i]) || !std::isfinite(exponents[i])) {
      throw ValidationError("basis '" + name + "': non-finite parameter");
    }
    if (exponents[i] <= 0.0) {
      throw ValidationError("basis '" + name + "': exponents must be positive");
    }
  }
}

StoBasis StoBasis::sto2g() {
  return {"sto-2g", {0.6789, 0.4301}, {0.1516, 0.8518}};
}

StoBasis StoBasis::sto3g() {
  return {"sto-3g",
          {0.15432897, 0.53532814, 0.44463454},
          {3.42525091, 0.62391373, 0.16885540}};
}

StoBasis StoBasis::by_name(const std::string& name) {
  if (name == "sto-2g" || name == "STO-2G") return sto2g();
  if (name == "sto-3g" || name == "STO-3G") return sto3g();
  if (std::filesystem::exists(name)) return load_json(name);
  throw ValidationError("unknown basis '" + name + "' (expected sto-2g, sto-3g or a JSON file)");
}

StoBasis StoBasis::load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open basis file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("malformed basis file " + path.string() + ": " + e.what());
  }
  StoBasis basis;
  basis.name = path.stem().string();
  try {
    basis.coefficients = j.at("A").get<std::vector<double>>();
    basis.exponents = j.at("alpha").get<std::vector<double>>();
    if (j.at("K").get<int>() != static_cast<int>(basis.exponents.size())) {
      throw ValidationError("basis file " + path.string() + ": K disagrees with alpha length");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("basis file " + path.string() + ": " + e.what());
  }
  basis.validate();
  return basis;
}

void StoBasis::save_json(const std::filesystem::path& path) const {
  nlohmann::json j{{"K", size()}, {"A", coefficients}, {"alpha", exponents}};
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write basis file " + path.string());
  out << j.dump(2) << '\n';
}

RealMatrix overlap_matrix(const StoBasis& basis) {
  basis.validate();
  const int k = basis.size();
  RealMatrix s(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const double ai = basis.exponents[i];
      const double aj = basis.exponents[j];
      s(i, j) = std::pow(2.0 * std::sqrt(ai * aj) / (ai + aj), 1.5);
    }
  }
  return s;
}

RealMatrix kinetic_matrix(const StoBasis& basis, double electron_mass) {
  if (!(electron_mass > 0.0)) throw ValidationError("electron mass must be positive");
  const RealMatrix s = overlap_matrix(basis);
  const int k = basis.size();
  RealMatrix t(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const double ai = basis.exponents[i];
      const double aj = basis.exponents[j];
      t(i, j) = 3.0 * ai * aj / (ai + aj) * s(i, j) / electron_mass;
    }
  }
  return t;
}

RealMatrix potential_matrix(const StoBasis& basis) {
  const RealMatrix s = overlap_matrix(basis);
  const int k = basis.size();
  RealMatrix v(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const double p = basis.exponents[i] + basis.exponents[j];
      v(i, j) = -2.0 * std::sqrt(p / std::numbers::pi) * s(i, j);
    }
  }
  return v;
}

double HydrogenModel::ground_state_energy() const {
  return hermitian_eig(h_ortho).values(0);
}

ComplexVector HydrogenModel::contraction_state() const {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(overlap);
  const RealMatrix s_sqrt =
      es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  const RealVector a = Eigen::Map<const RealVector>(basis.coefficients.data(), dim());
  RealVector psi = s_sqrt * a;
  const double norm = psi.norm();
  if (!(norm > 0.0)) throw ValidationError("contraction vector has zero norm");
  return (psi / norm).cast<Complex>();
}

HydrogenModel build_model(const StoBasis& basis, double electron_mass) {
  if (!(electron_mass > 0.0) || !std::isfinite(electron_mass)) {
    throw ValidationError("electron mass must be positive and finite");
  }
  basis.validate();

  HydrogenModel m;
  m.basis = basis;
  m.electron_mass = electron_mass;
  m.overlap = overlap_matrix(basis);
  const RealMatrix h = kinetic_matrix(basis, electron_mass) + potential_matrix(basis);
  m.hamiltonian = h.cast<Complex>();

  Eigen::SelfAdjointEigenSolver<RealMatrix> es(m.overlap);
  // Coincident exponents make S singular up to roundoff, so the test is relative.
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 1e-12 * es.eigenvalues().maxCoeff()) {
    throw NumericalError("overlap matrix is not positive definite (min eigenvalue " +
                         std::to_string(es.eigenvalues().minCoeff()) + ")");
  }
  m.overlap_inv_sqrt = es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                       es.eigenvectors().transpose();
  const RealMatrix ortho = m.overlap_inv_sqrt * h * m.overlap_inv_sqrt;
  // Symmetrize away roundoff so the Hermitian invariant holds exactly.
  m.h_ortho = (0.5 * (ortho + ortho.transpose())).cast<Complex>();
  return m;
}

UnitaryMatrix target_propagator(const HydrogenModel& model, double dt) {
  if (!std::isfinite(dt)) throw ValidationError("time step must be finite");
  return expm_neg_i(model.h_ortho, dt);
}

}  // namespace cprlab
