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

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "cprlab/grape.hpp"

namespace cprlab {

// Maps [lo, hi] affinely onto [-1, 1]. A degenerate interval maps to 0.
struct AffineMap {
  double lo = 0.0;
  double hi = 1.0;
  double to_unit(double x) const { return hi > lo ? (2.0 * x - lo - hi) / (hi - lo) : 0.0; }
};

/// Rows [1, x, x^2, ..., x^degree] for every x.
RealMatrix vandermonde(const RealVector& x, int degree);

struct PolyFitDiagnostics {
  std::array<std::vector<double>, 2> time_fit_rms;  // per member, per quadrature
  std::array<double, 2> param_fit_rms{};            // worst coefficient over j
  double time_condition = 0.0;
  double param_condition = 0.0;
};

// Two-level polynomial surrogate of a pulse family. For each quadrature q,
//   eps_q(s; u) = sum_j c_j(u) s^j,   c_j(u) = sum_k coefficients[q](j, k) u^k,
// where s is the sample midpoint time mapped from [0, tau] to [-1, 1] and u is
// the parameter mapped from the family span to [-1, 1].
struct PolyPulseModel {
  std::string parameter_name;
  int degree_time = 10;
  int degree_param = 4;
  int n_steps = 0;
  double tau_ns = 0.0;
  AffineMap param_domain;
  std::array<RealMatrix, 2> coefficients;  // [I, Q], (degree_time + 1) x (degree_param + 1)
  PolyFitDiagnostics diagnostics;
  nlohmann::json context = nlohmann::json::object();

  /// c_j(lambda) for one quadrature (0 = I, 1 = Q), in normalized time coordinates.
  RealVector time_coefficients(int quadrature, double lambda) const;

  /// Throws ValidationError when lambda is outside the fitted span and extrapolate is false.
  ControlPulse reconstruct(double lambda, bool extrapolate = false) const;

  nlohmann::json to_json() const;
  static PolyPulseModel from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static PolyPulseModel load(const std::filesystem::path& path);
};

/// Least-squares fit in time, then least-squares fit of every time coefficient
/// across the family grid. Throws ValidationError when underdetermined and
/// NumericalError when a design matrix is rank deficient or ill-conditioned.
PolyPulseModel fit_poly_model(const PulseFamily& family, int degree_time, int degree_param);

}  // namespace cprlab
