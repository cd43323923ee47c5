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
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cprlab/grape.hpp"
#include "cprlab/hydrogen_model.hpp"
#include "cprlab/reconstruction.hpp"

namespace cprlab {

using TargetFn = std::function<UnitaryMatrix(double)>;

// Parametric hydrogen propagators: lambda is either the time step (electron
// mass held fixed) or the electron mass (time step held fixed).
struct HydrogenTargets {
  StoBasis basis = StoBasis::sto2g();
  std::string parameter = "dt";  // "dt" or "m_e"
  double dt = 1.0;               // inverse Hartree, used when parameter == "m_e"
  double electron_mass = 1.0;    // used when parameter == "dt"

  HydrogenModel model_at(double lambda) const;
  UnitaryMatrix operator()(double lambda) const;
  double step_at(double lambda) const { return parameter == "dt" ? lambda : dt; }

  nlohmann::json to_json() const;
  static HydrogenTargets from_json(const nlohmann::json& j);
};

struct EvolutionTrace {
  std::string source;  // "reconstructed" or "exact"
  std::vector<double> times;
  std::vector<ComplexVector> amplitudes;

  std::size_t size() const { return times.size(); }
  RealMatrix populations() const;  // rows follow times, columns are levels
};

/// psi_{k+1} = U psi_k for `steps` applications; times are multiples of dt.
EvolutionTrace evolve_repeated(const UnitaryMatrix& u, const ComplexVector& psi0, int steps, double dt = 1.0,
                               std::string source = "reconstructed");

/// psi(t) = exp(-i t H_ortho) psi0 on every grid point.
EvolutionTrace exact_evolution(const HydrogenModel& model, const ComplexVector& psi0, const std::vector<double>& t_grid);

/// Largest |p_a(t, level) - p_b(t, level)| over the shared levels of two equally long traces.
double max_population_deviation(const EvolutionTrace& a, const EvolutionTrace& b);

struct MassSchedule {
  int n_max = 40;
  std::vector<double> values;  // m_e^j = base + amplitude sin(j pi / n_max), j = 0..n_max

  static MassSchedule sinusoidal(int n_max, double amplitude = 0.2, double base = 1.0);
};

struct DynamicMassResult {
  EvolutionTrace reconstructed;
  EvolutionTrace exact;
};

/// At every schedule entry: rebuild the pulse at m_e^j, propagate it on the
/// device and apply it; the exact branch applies exp(-i dt H_ortho(m_e^j)).
DynamicMassResult dynamic_mass_simulation(const PulseModel& model, const MassSchedule& schedule,
                                          const DeviceConfig& cfg, const StoBasis& basis, double dt,
                                          const ComplexVector& psi0);

struct FidelityReport {
  std::vector<double> grid;
  std::vector<double> fidelities;
  double mean = 0.0;
  double min = 0.0;

  nlohmann::json to_json() const;
};

FidelityReport verify_model(const PulseModel& model, const TargetFn& targets, const std::vector<double>& holdout,
                            const DeviceConfig& cfg);

struct TimingReport {
  double mean_reconstruct_seconds = 0.0;
  double mean_optimize_seconds = 0.0;
  double speedup_ratio = 0.0;
  std::size_t sample_count = 0;
  std::vector<double> reconstruct_fidelities;
  std::vector<double> optimize_fidelities;

  nlohmann::json to_json(bool include_timing = true) const;
};

/// Mean wall clock of (reconstruct + device propagation) against a GRAPE solve
/// from the zero pulse for the same targets.
TimingReport benchmark(const PulseModel& model, const TargetFn& targets, const DeviceConfig& cfg,
                       const GrapeSettings& settings, const std::vector<double>& samples);

void write_trace_csv(const std::filesystem::path& path, const EvolutionTrace& trace);

}  // namespace cprlab
