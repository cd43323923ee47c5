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

#include "cprlab/grape.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "cprlab/errors.hpp"
#include "cprlab/lbfgs.hpp"

namespace cprlab {
namespace {

ComplexMatrix padded_target(const UnitaryMatrix& target, int dim) {
  if (target.rows() != target.cols()) throw ValidationError("target must be square");
  if (target.rows() > dim) {
    throw ValidationError("target dimension " + std::to_string(target.rows()) + " exceeds device dim " +
                          std::to_string(dim));
  }
  ComplexMatrix w = ComplexMatrix::Zero(dim, dim);
  w.topLeftCorner(target.rows(), target.cols()) = target;
  return w;
}

// (f(a) - f(b)) / (a - b) for f(x) = exp(-i dt x), written with sinc so that it
// stays exact as a -> b.
Complex divided_difference(double a, double b, double dt) {
  const double mean = 0.5 * (a + b);
  const double half = 0.5 * dt * (a - b);
  const double sinc = std::abs(half) < 1e-8 ? 1.0 - half * half / 6.0 : std::sin(half) / half;
  return Complex(0.0, -dt) * std::polar(1.0, -dt * mean) * sinc;
}

RealVector pack(const ControlPulse& p) {
  RealVector x(2 * p.n_steps());
  x << p.eps_i, p.eps_q;
  return x;
}

ControlPulse unpack(const RealVector& x, double tau) {
  const Eigen::Index n = x.size() / 2;
  return {x.head(n), x.tail(n), tau};
}

}  // namespace

void GrapeSettings::validate() const {
  if (!(target_infidelity > 0.0 && target_infidelity < 1.0)) {
    throw ValidationError("target_infidelity must lie in (0, 1)");
  }
  if (max_iterations < 1) throw ValidationError("max_iterations must be at least 1");
  if (gradient_tolerance < 0.0) throw ValidationError("gradient_tolerance must be non-negative");
  if (lbfgs_history < 1) throw ValidationError("lbfgs_history must be at least 1");
}

std::vector<double> PulseFamily::non_converged() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i].converged) out.push_back(parameter_values[i]);
  }
  return out;
}

void PulseFamily::validate() const {
  if (parameter_values.empty()) throw ValidationError("family is empty");
  if (pulses.size() != parameter_values.size()) throw ValidationError("family pulse count mismatch");
  if (!results.empty() && results.size() != parameter_values.size()) {
    throw ValidationError("family result count mismatch");
  }
  for (std::size_t i = 1; i < parameter_values.size(); ++i) {
    if (!(parameter_values[i] > parameter_values[i - 1])) {
      throw ValidationError("family parameter grid must be strictly increasing");
    }
  }
  for (const auto& p : pulses) {
    if (p.n_steps() != pulses.front().n_steps()) throw ValidationError("family pulses differ in length");
    p.validate();
  }
}

double infidelity(const ControlPulse& pulse, const UnitaryMatrix& target, const DeviceConfig& cfg) {
  if (target.rows() != target.cols() || target.rows() > cfg.dim) {
    throw ValidationError("target dimension incompatible with device dim " + std::to_string(cfg.dim));
  }
  const ComplexMatrix u = propagate(cfg, pulse);
  return 1.0 - fidelity(target, logical_block(u, static_cast<int>(target.rows())));
}

InfidelityGradient infidelity_gradient(const ControlPulse& pulse, const UnitaryMatrix& target,
                                       const DeviceConfig& cfg) {
  const int n = cfg.n_steps;
  if (pulse.n_steps() != n) throw ValidationError("pulse length does not match device n_steps");
  const int dim = cfg.dim;
  const double d = static_cast<double>(target.rows());
  const ComplexMatrix w_adj = padded_target(target, dim).adjoint();
  const HermitianMatrix drift = drift_hamiltonian(cfg);
  const ComplexMatrix gen_i = in_phase_generator(dim);
  const ComplexMatrix gen_q = quadrature_generator(dim);
  const double dt = cfg.step_ns();

  std::vector<EigenSystem> eigs;
  std::vector<ComplexMatrix> forward;  // forward[k] = U_k ... U_1, forward[0] = I
  eigs.reserve(n);
  forward.reserve(n + 1);
  forward.push_back(ComplexMatrix::Identity(dim, dim));
  std::vector<ComplexMatrix> steps;
  steps.reserve(n);
  for (int k = 0; k < n; ++k) {
    eigs.push_back(hermitian_eig(drift + pulse.eps_i(k) * gen_i + pulse.eps_q(k) * gen_q));
    steps.push_back(expm_neg_i(eigs.back(), dt));
    forward.push_back(steps.back() * forward.back());
  }

  const Complex overlap = (w_adj * forward.back()).trace();
  InfidelityGradient out;
  out.infidelity = 1.0 - std::norm(overlap) / (d * d);
  out.d_eps_i.resize(n);
  out.d_eps_q.resize(n);

  ComplexMatrix tail = w_adj;  // W^dagger U_N ... U_{k+1}
  ComplexMatrix dd(dim, dim);
  for (int k = n - 1; k >= 0; --k) {
    const EigenSystem& e = eigs[k];
    for (int a = 0; a < dim; ++a) {
      for (int b = 0; b < dim; ++b) dd(a, b) = divided_difference(e.values(a), e.values(b), dt);
    }
    // d Tr(W^dagger U) = Tr(M dU_k), M = U_{k-1}...U_1 W^dagger U_N...U_{k+1}
    const ComplexMatrix m_eig = e.vectors.adjoint() * (forward[k] * tail) * e.vectors;
    const ComplexMatrix gi = e.vectors.adjoint() * gen_i * e.vectors;
    const ComplexMatrix gq = e.vectors.adjoint() * gen_q * e.vectors;
    const ComplexMatrix weight = m_eig.transpose().cwiseProduct(dd);
    const Complex dg_i = weight.cwiseProduct(gi).sum();
    const Complex dg_q = weight.cwiseProduct(gq).sum();
    out.d_eps_i(k) = -2.0 * (std::conj(overlap) * dg_i).real() / (d * d);
    out.d_eps_q(k) = -2.0 * (std::conj(overlap) * dg_q).real() / (d * d);
    tail = tail * steps[k];
  }
  return out;
}

ControlPulse random_pulse(const DeviceConfig& cfg, double amplitude, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  ControlPulse p = ControlPulse::zeros(cfg);
  for (int k = 0; k < cfg.n_steps; ++k) p.eps_i(k) = dist(rng);
  for (int k = 0; k < cfg.n_steps; ++k) p.eps_q(k) = dist(rng);
  return p;
}

OptimizationResult optimize_pulse(const UnitaryMatrix& target, const DeviceConfig& cfg,
                                  const GrapeSettings& settings, const ControlPulse& initial_guess) {
  settings.validate();
  cfg.validate(static_cast<int>(target.rows()));
  if (initial_guess.n_steps() != cfg.n_steps) {
    throw ValidationError("initial guess length does not match device n_steps");
  }
  const auto start = std::chrono::steady_clock::now();

  const double tau = cfg.pulse_duration_ns;
  const Objective objective = [&](const RealVector& x, RealVector& grad) {
    const InfidelityGradient r = infidelity_gradient(unpack(x, tau), target, cfg);
    grad << r.d_eps_i, r.d_eps_q;
    return r.infidelity;
  };

  LbfgsOptions opt;
  opt.history = settings.lbfgs_history;
  opt.max_iterations = settings.max_iterations;
  opt.f_target = settings.target_infidelity;
  opt.gradient_tolerance = settings.gradient_tolerance;
  opt.bound = settings.amplitude_bound;
  // Infidelity is periodic in pulse area, so an unscaled first step can land
  // several rotations away. Cap it at roughly half a radian of drive area.
  opt.initial_step = 0.25 / tau * std::sqrt(2.0 * cfg.n_steps);
  const LbfgsResult r = minimize_lbfgs(objective, pack(initial_guess), opt);

  OptimizationResult out;
  out.pulse = unpack(r.x, tau);
  out.final_fidelity = std::clamp(1.0 - r.f, 0.0, 1.0);
  out.iterations = r.iterations;
  out.converged = r.f <= settings.target_infidelity;
  out.stop_reason = to_string(r.status);
  out.infidelity_trace = r.best_trace;
  out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

PulseFamily sweep_family(const std::string& parameter_name,
                         const std::vector<std::pair<double, UnitaryMatrix>>& targets, const DeviceConfig& cfg,
                         const GrapeSettings& settings) {
  if (targets.empty()) throw ValidationError("sweep needs at least one target");
  for (std::size_t i = 1; i < targets.size(); ++i) {
    if (!(targets[i].first > targets[i - 1].first)) {
      throw ValidationError("sweep grid must be strictly increasing");
    }
  }
  PulseFamily family;
  family.parameter_name = parameter_name;
  family.device = cfg;
  family.settings = settings;

  ControlPulse guess = ControlPulse::zeros(cfg);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (i > 0 && !settings.warm_start) {
      guess = random_pulse(cfg, settings.random_guess_amplitude, settings.seed + i);
    }
    OptimizationResult r = optimize_pulse(targets[i].second, cfg, settings, guess);
    if (settings.warm_start) guess = r.pulse;
    family.parameter_values.push_back(targets[i].first);
    family.pulses.push_back(r.pulse);
    family.results.push_back(std::move(r));
  }
  return family;
}

}  // namespace cprlab
