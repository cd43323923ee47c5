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

#include "cprlab/sim_harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>

#include "cprlab/errors.hpp"

namespace cprlab {
namespace {

constexpr double kNormTol = 1e-9;

void check_state(const ComplexVector& psi) {
  if (psi.size() == 0 || !psi.allFinite()) throw ValidationError("initial state is empty or non-finite");
  if (std::abs(psi.norm() - 1.0) > kNormTol) {
    throw ValidationError("initial state is not normalized (norm " + std::to_string(psi.norm()) + ")");
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

HydrogenModel HydrogenTargets::model_at(double lambda) const {
  return build_model(basis, parameter == "m_e" ? lambda : electron_mass);
}

UnitaryMatrix HydrogenTargets::operator()(double lambda) const {
  return target_propagator(model_at(lambda), step_at(lambda));
}

nlohmann::json HydrogenTargets::to_json() const {
  return {{"basis", basis.name},
          {"basis_A", basis.coefficients},
          {"basis_alpha", basis.exponents},
          {"parameter", parameter},
          {"dt_hartree_inv", dt},
          {"m_e", electron_mass}};
}

HydrogenTargets HydrogenTargets::from_json(const nlohmann::json& j) {
  try {
    HydrogenTargets t;
    t.basis = {j.at("basis").get<std::string>(), j.at("basis_A").get<std::vector<double>>(),
               j.at("basis_alpha").get<std::vector<double>>()};
    t.basis.validate();
    t.parameter = j.at("parameter").get<std::string>();
    if (t.parameter != "dt" && t.parameter != "m_e") throw ValidationError("parameter must be dt or m_e");
    t.dt = j.at("dt_hartree_inv").get<double>();
    t.electron_mass = j.at("m_e").get<double>();
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("target context: ") + e.what());
  }
}

RealMatrix EvolutionTrace::populations() const {
  if (amplitudes.empty()) return {};
  RealMatrix p(amplitudes.size(), amplitudes.front().size());
  for (std::size_t t = 0; t < amplitudes.size(); ++t) p.row(t) = amplitudes[t].cwiseAbs2().transpose();
  return p;
}

EvolutionTrace evolve_repeated(const UnitaryMatrix& u, const ComplexVector& psi0, int steps, double dt,
                               std::string source) {
  check_state(psi0);
  if (steps < 0) throw ValidationError("step count must be non-negative");
  if (u.rows() != psi0.size() || u.cols() != psi0.size()) {
    throw ValidationError("propagator and state dimensions differ");
  }
  EvolutionTrace trace{std::move(source), {0.0}, {psi0}};
  ComplexVector psi = psi0;
  for (int k = 1; k <= steps; ++k) {
    psi = u * psi;
    trace.times.push_back(k * dt);
    trace.amplitudes.push_back(psi);
  }
  return trace;
}

EvolutionTrace exact_evolution(const HydrogenModel& model, const ComplexVector& psi0,
                               const std::vector<double>& t_grid) {
  check_state(psi0);
  if (psi0.size() != model.dim()) throw ValidationError("state dimension does not match the model");
  const EigenSystem eig = hermitian_eig(model.h_ortho);
  EvolutionTrace trace{"exact", {}, {}};
  for (double t : t_grid) {
    trace.times.push_back(t);
    trace.amplitudes.push_back(expm_neg_i(eig, t) * psi0);
  }
  return trace;
}

double max_population_deviation(const EvolutionTrace& a, const EvolutionTrace& b) {
  if (a.size() != b.size()) throw ValidationError("traces have different lengths");
  const RealMatrix pa = a.populations();
  const RealMatrix pb = b.populations();
  if (pa.size() == 0) return 0.0;
  const Eigen::Index levels = std::min(pa.cols(), pb.cols());
  return (pa.leftCols(levels) - pb.leftCols(levels)).cwiseAbs().maxCoeff();
}

MassSchedule MassSchedule::sinusoidal(int n_max, double amplitude, double base) {
  if (n_max < 1) throw ValidationError("schedule needs n_max >= 1");
  MassSchedule s;
  s.n_max = n_max;
  for (int j = 0; j <= n_max; ++j) {
    s.values.push_back(base + amplitude * std::sin(j * std::numbers::pi / n_max));
  }
  return s;
}

DynamicMassResult dynamic_mass_simulation(const PulseModel& model, const MassSchedule& schedule,
                                          const DeviceConfig& cfg, const StoBasis& basis, double dt,
                                          const ComplexVector& psi0) {
  check_state(psi0);
  const int logical = basis.size();
  if (psi0.size() != logical) throw ValidationError("state dimension does not match the basis");
  cfg.validate(logical);

  ComplexVector psi_dev = ComplexVector::Zero(cfg.dim);
  psi_dev.head(logical) = psi0;
  ComplexVector psi_exact = psi0;
  DynamicMassResult out{{"reconstructed", {0.0}, {psi_dev}}, {"exact", {0.0}, {psi_exact}}};

  for (std::size_t j = 0; j < schedule.values.size(); ++j) {
    const double mass = schedule.values[j];
    const ControlPulse pulse = reconstruct(model, mass);
    psi_dev = propagate(cfg, pulse) * psi_dev;
    psi_exact = target_propagator(build_model(basis, mass), dt) * psi_exact;
    const double t = static_cast<double>(j + 1) * dt;
    out.reconstructed.times.push_back(t);
    out.reconstructed.amplitudes.push_back(psi_dev);
    out.exact.times.push_back(t);
    out.exact.amplitudes.push_back(psi_exact);
  }
  return out;
}

nlohmann::json FidelityReport::to_json() const {
  return {{"grid", grid}, {"fidelities", fidelities}, {"mean", mean}, {"min", min}};
}

FidelityReport verify_model(const PulseModel& model, const TargetFn& targets, const std::vector<double>& holdout,
                            const DeviceConfig& cfg) {
  if (holdout.empty()) throw ValidationError("holdout grid is empty");
  FidelityReport r;
  r.grid = holdout;
  for (double lambda : holdout) {
    const UnitaryMatrix target = targets(lambda);
    const ComplexMatrix u = logical_block(propagate(cfg, reconstruct(model, lambda)), static_cast<int>(target.rows()));
    r.fidelities.push_back(fidelity(target, u));
  }
  r.mean = std::accumulate(r.fidelities.begin(), r.fidelities.end(), 0.0) / r.fidelities.size();
  r.min = *std::min_element(r.fidelities.begin(), r.fidelities.end());
  return r;
}

nlohmann::json TimingReport::to_json(bool include_timing) const {
  nlohmann::json j{{"sample_count", sample_count},
                   {"reconstruct_fidelities", reconstruct_fidelities},
                   {"optimize_fidelities", optimize_fidelities}};
  if (include_timing) {
    j["mean_reconstruct_seconds"] = mean_reconstruct_seconds;
    j["mean_optimize_seconds"] = mean_optimize_seconds;
    j["speedup_ratio"] = speedup_ratio;
  }
  return j;
}

TimingReport benchmark(const PulseModel& model, const TargetFn& targets, const DeviceConfig& cfg,
                       const GrapeSettings& settings, const std::vector<double>& samples) {
  if (samples.empty()) throw ValidationError("benchmark needs at least one sample");
  TimingReport r;
  r.sample_count = samples.size();
  double t_rec = 0.0;
  double t_opt = 0.0;
  for (double lambda : samples) {
    const UnitaryMatrix target = targets(lambda);
    const int logical = static_cast<int>(target.rows());

    auto t0 = std::chrono::steady_clock::now();
    const ComplexMatrix u = propagate(cfg, reconstruct(model, lambda));
    t_rec += seconds_since(t0);
    r.reconstruct_fidelities.push_back(fidelity(target, logical_block(u, logical)));

    t0 = std::chrono::steady_clock::now();
    const OptimizationResult opt = optimize_pulse(target, cfg, settings, ControlPulse::zeros(cfg));
    t_opt += seconds_since(t0);
    r.optimize_fidelities.push_back(opt.final_fidelity);
  }
  r.mean_reconstruct_seconds = t_rec / samples.size();
  r.mean_optimize_seconds = t_opt / samples.size();
  r.speedup_ratio = r.mean_optimize_seconds / r.mean_reconstruct_seconds;
  return r;
}

void write_trace_csv(const std::filesystem::path& path, const EvolutionTrace& trace) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write trace file " + path.string());
  const RealMatrix p = trace.populations();
  out << "time";
  for (Eigen::Index k = 0; k < p.cols(); ++k) out << ",pop_" << k;
  out << '\n';
  char buf[40];
  for (Eigen::Index t = 0; t < p.rows(); ++t) {
    std::snprintf(buf, sizeof buf, "%.17g", trace.times[t]);
    out << buf;
    for (Eigen::Index k = 0; k < p.cols(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", p(t, k));
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace cprlab
