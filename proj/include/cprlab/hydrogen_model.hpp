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

#include <filesystem>
#include <string>
#include <vector>

#include "cprlab/quantum_core.hpp"

namespace cprlab {

// Contracted s-type Gaussian basis for the hydrogen 1s orbital. Primitives are
// normalized, chi_i(r) = (2 alpha_i / pi)^{3/4} exp(-alpha_i r^2), and
// the 1s orbital is sum_i A_i chi_i. Atomic units throughout.
struct StoBasis {
  std::string name;
  std::vector<double> coefficients;  // A_i
  std::vector<double> exponents;     // alpha_i, bohr^-2

  int size() const { return static_cast<int>(exponents.size()); }

  /// Throws ValidationError unless K in {2, 3}, sizes agree, exponents > 0 and all finite.
  void validate() const;

  static StoBasis sto2g();  // A = (0.6789, 0.4301), alpha = (0.1516, 0.8518)
  static StoBasis sto3g();  // standard published hydrogen STO-3G set
  static StoBasis by_name(const std::string& name);

  /// {"K":2,"A":[...],"alpha":[...]}
  static StoBasis load_json(const std::filesystem::path& path);
  void save_json(const std::filesystem::path& path) const;
};

RealMatrix overlap_matrix(const StoBasis& basis);
RealMatrix kinetic_matrix(const StoBasis& basis, double electron_mass);
RealMatrix potential_matrix(const StoBasis& basis);

struct HydrogenModel {
  StoBasis basis;
  double electron_mass = 1.0;
  HermitianMatrix hamiltonian;  // T + V in the primitive basis, Hartree
  RealMatrix overlap;
  RealMatrix overlap_inv_sqrt;  // S^{-1/2}
  HermitianMatrix h_ortho;      // S^{-1/2} H S^{-1/2}

  int dim() const { return basis.size(); }
  double ground_state_energy() const;

  /// The contraction vector sum_i A_i chi_i written in the orthonormal basis,
  /// i.e. S^{1/2} A normalized to unit length.
  ComplexVector contraction_state() const;
};

/// Builds H = T + V and its Loewdin-orthogonalized form.
/// Throws ValidationError for m_e <= 0 and NumericalError if S is not positive definite.
HydrogenModel build_model(const StoBasis& basis, double electron_mass);

/// exp(-i dt H_ortho), dt in inverse Hartree.
UnitaryMatrix target_propagator(const HydrogenModel& model, double dt);

}  // namespace cprlab
