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

#include <vector>

#include "cprlab/quantum_core.hpp"

namespace cprlab {

// Driven transmon in its rotating frame, truncated to `dim` levels. Time is in
// ns and envelopes in angular GHz (rad/ns) with hbar = 1.
struct DeviceConfig {
  int dim = 2;
  double anharmonicity_over_2pi_ghz = 2.1693;
  double pulse_duration_ns = 50.0;
  int n_steps = 1600;

  double sample_rate_ghz() const { return n_steps / pulse_duration_ns; }
  double step_ns() const { return pulse_duration_ns / n_steps; }

  /// Throws ValidationError if the config is unusable for a target of `logical_dim`.
  void validate(int logical_dim = 2) const;
};

struct ControlPulse {
  RealVector eps_i;  // in-phase envelope, rad/ns
  RealVector eps_q;  // in-quadrature envelope, rad/ns
  double tau_ns = 0.0;  // total duration; dt_step = tau_ns / N

  int n_steps() const { return static_cast<int>(eps_i.size()); }
  double duration() const { return tau_ns; }
  double dt_step() const { return tau_ns / n_steps(); }

  /// Sample midpoints (k + 1/2) dt_step.
  RealVector times() const;

  /// Throws ValidationError on length mismatch, non-finite samples, or when
  /// amplitude_bound > 0 and some |eps| exceeds it.
  void validate(double amplitude_bound = 0.0) const;

  static ControlPulse zeros(const DeviceConfig& cfg);
};

/// -(alpha_T / 2) n (n - 1) on the diagonal, alpha_T = 2 pi * anharmonicity_over_2pi_ghz.
HermitianMatrix drift_hamiltonian(const DeviceConfig& cfg);

/// Truncated lowering operator, <n-1|a|n> = sqrt(n).
ComplexMatrix lowering_operator(int dim);

/// The quadrature generators a^dagger + a and i (a^dagger - a).
ComplexMatrix in_phase_generator(int dim);
ComplexMatrix quadrature_generator(int dim);

/// eI (a^dagger + a) + i eQ (a^dagger - a).
HermitianMatrix control_hamiltonian(double e_i, double e_q, int dim);

/// The N piecewise-constant step factors U_k = exp(-i dt (H_d + H_c(k))).
std::vector<UnitaryMatrix> step_propagators(const DeviceConfig& cfg, const ControlPulse& pulse);

/// Time-ordered product U_N ... U_1.
UnitaryMatrix propagate(const DeviceConfig& cfg, const ControlPulse& pulse);

/// Upper-left logical_dim block of a device propagator.
ComplexMatrix logical_block(const UnitaryMatrix& u, int logical_dim);

}  // namespace cprlab
