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

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cprlab/quantum_core.hpp"
#include "cprlab/transmon.hpp"

namespace cprlab {

struct GrapeSettings {
  double target_infidelity = 1e-6;
  int max_iterations = 500;
  double gradient_tolerance = 1e-12;
  bool warm_start = true;
  std::uint64_t seed = 0;
  int lbfgs_history = 20;
  double amplitude_bound = 0.0;          // symmetric box on every sample; <= 0 disables it
  double random_guess_amplitude = 0.05;  // rad/ns, used when a random initial guess is requested

  void validate() const;
};

struct OptimizationResult {
  ControlPulse pulse;
  double final_fidelity = 0.0;
  int iterations = 0;
  bool converged = false;
  double wall_time = 0.0;  // seconds
  std::string stop_reason;
  std::vector<double> infidelity_trace;  // best-so-far, one entry per iteration
};

struct PulseFamily {
  std::string parameter_name;  // "dt" or "m_e"
  std::vector<double> parameter_values;
  std::vector<ControlPulse> pulses;
  DeviceConfig device;
  GrapeSettings settings;
  std::vector<OptimizationResult> results;

  std::size_t size() const { return parameter_values.size(); }
  std::vector<double> non_converged() const;
  void validate() const;
};

/// 1 - fidelity(target, logical block of propagate(cfg, pulse)).
double infidelity(const ControlPulse& pulse, const UnitaryMatrix& target, const DeviceConfig& cfg);

struct InfidelityGradient {
  double infidelity = 0.0;
  RealVector d_eps_i;
  RealVector d_eps_q;
};

/// Exact piecewise-constant gradient. Each step derivative uses the eigenbasis
/// (divided difference) form of the Frechet derivative of exp(-i dt H).
InfidelityGradient infidelity_gradient(const ControlPulse& pulse, const UnitaryMatrix& target,
                                       const DeviceConfig& cfg);

/// Random envelope, uniform in [-amplitude, amplitude], reproducible from seed.
ControlPulse random_pulse(const DeviceConfig& cfg, double amplitude, std::uint64_t seed);

/// L-BFGS over both quadratures. Never throws on non-convergence; it is reported
/// through OptimizationResult::converged.
OptimizationResult optimize_pulse(const UnitaryMatrix& target, const DeviceConfig& cfg,
                                  const GrapeSettings& settings, const ControlPulse& initial_guess);

/// Sequential sweep over an ascending grid. The first member starts from the
/// zero pulse; later members start from the previous solution when
/// settings.warm_start is set, otherwise from random_pulse(seed + index).
PulseFamily sweep_family(const std::string& parameter_name,
                         const std::vector<std::pair<double, UnitaryMatrix>>& targets, const DeviceConfig& cfg,
                         const GrapeSettings& settings);

}  // namespace cprlab
