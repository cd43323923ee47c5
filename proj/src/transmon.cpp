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

#include "cprlab/transmon.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cprlab/errors.hpp"

namespace cprlab {

void DeviceConfig::validate(int logical_dim) const {
  if (dim < 2) throw ValidationError("device dim must be at least 2");
  if (dim < logical_dim) {
    throw ValidationError("device dim " + std::to_string(dim) + " is smaller than the target dimension " +
                          std::to_string(logical_dim));
  }
  if (n_steps < 1) throw ValidationError("n_steps must be at least 1");
  if (!(pulse_duration_ns > 0.0) || !std::isfinite(pulse_duration_ns)) {
    throw ValidationError("pulse duration must be positive");
  }
  if (!std::isfinite(anharmonicity_over_2pi_ghz)) {
    throw ValidationError("anharmonicity must be finite");
  }
}

RealVector ControlPulse::times() const {
  RealVector t(n_steps());
  for (int k = 0; k < n_steps(); ++k) t(k) = (k + 0.5) * dt_step();
  return t;
}

void ControlPulse::validate(double amplitude_bound) const {
  if (eps_i.size() != eps_q.size()) throw ValidationError("pulse quadratures differ in length");
  if (eps_i.size() == 0) throw ValidationError("pulse is empty");
  if (!(tau_ns > 0.0) || !std::isfinite(tau_ns)) throw ValidationError("pulse duration must be positive");
  if (!eps_i.allFinite() || !eps_q.allFinite()) throw ValidationError("pulse has non-finite samples");
  if (amplitude_bound > 0.0) {
    const double peak = std::max(eps_i.cwiseAbs().maxCoeff(), eps_q.cwiseAbs().maxCoeff());
    if (peak > amplitude_bound) {
      throw ValidationError("pulse amplitude " + std::to_string(peak) + " exceeds bound " +
                            std::to_string(amplitude_bound));
    }
  }
}

ControlPulse ControlPulse::zeros(const DeviceConfig& cfg) {
  return {RealVector::Zero(cfg.n_steps), RealVector::Zero(cfg.n_steps), cfg.pulse_duration_ns};
}

HermitianMatrix drift_hamiltonian(const DeviceConfig& cfg) {
  const double alpha = 2.0 * std::numbers::pi * cfg.anharmonicity_over_2pi_ghz;
  ComplexMatrix h = ComplexMatrix::Zero(cfg.dim, cfg.dim);
  for (int n = 0; n < cfg.dim; ++n) h(n, n) = -0.5 * alpha * n * (n - 1);
  return h;
}

ComplexMatrix lowering_operator(int dim) {
  ComplexMatrix a = ComplexMatrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

ComplexMatrix in_phase_generator(int dim) {
  const ComplexMatrix a = lowering_operator(dim);
  return a.adjoint() + a;
}

ComplexMatrix quadrature_generator(int dim) {
  const ComplexMatrix a = lowering_operator(dim);
  return Complex(0.0, 1.0) * (a.adjoint() - a);
}

HermitianMatrix control_hamiltonian(double e_i, double e_q, int dim) {
  return e_i * in_phase_generator(dim) + e_q * quadrature_generator(dim);
}

std::vector<UnitaryMatrix> step_propagators(const DeviceConfig& cfg, const ControlPulse& pulse) {
  if (pulse.n_steps() != cfg.n_steps) {
    throw ValidationError("pulse has " + std::to_string(pulse.n_steps()) + " steps, device expects " +
                          std::to_string(cfg.n_steps));
  }
  pulse.validate();
  if (std::abs(pulse.tau_ns - cfg.pulse_duration_ns) > 1e-9 * cfg.pulse_duration_ns) {
    throw ValidationError("pulse duration does not match the device pulse duration");
  }
  const HermitianMatrix drift = drift_hamiltonian(cfg);
  const ComplexMatrix gen_i = in_phase_generator(cfg.dim);
  const ComplexMatrix gen_q = quadrature_generator(cfg.dim);
  const double dt = cfg.step_ns();

  std::vector<UnitaryMatrix> steps;
  steps.reserve(cfg.n_steps);
  for (int k = 0; k < cfg.n_steps; ++k) {
    const HermitianMatrix h = drift + pulse.eps_i(k) * gen_i + pulse.eps_q(k) * gen_q;
    steps.push_back(expm_neg_i(h, dt));
  }
  return steps;
}

UnitaryMatrix propagate(const DeviceConfig& cfg, const ControlPulse& pulse) {
  const auto steps = step_propagators(cfg, pulse);
  UnitaryMatrix u = UnitaryMatrix::Identity(cfg.dim, cfg.dim);
  for (const auto& s : steps) u = s * u;
  return u;
}

ComplexMatrix logical_block(const UnitaryMatrix& u, int logical_dim) {
  if (logical_dim > u.rows()) throw ValidationError("logical dimension exceeds propagator size");
  return u.topLeftCorner(logical_dim, logical_dim);
}

}  // namespace cprlab
