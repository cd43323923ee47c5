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
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "cprlab/errors.hpp"
#include "cprlab/grape.hpp"
#include "cprlab/hydrogen_model.hpp"
#include "oracles.hpp"

namespace cprlab {
namespace {

DeviceConfig device(int dim, int n_steps) {
  DeviceConfig cfg;
  cfg.dim = dim;
  cfg.n_steps = n_steps;
  return cfg;
}

UnitaryMatrix random_unitary(int dim, std::mt19937_64& rng) {
  return expm_neg_i(oracle::random_hermitian(dim, rng), 1.0);
}

double rms(const RealVector& a) { return std::sqrt(a.squaredNorm() / a.size()); }

double pulse_rms_distance(const ControlPulse& a, const ControlPulse& b) {
  RealVector d(2 * a.n_steps());
  d << a.eps_i - b.eps_i, a.eps_q - b.eps_q;
  return rms(d);
}

// Central differences of the infidelity in every sample, both quadratures.
RealVector finite_difference(const ControlPulse& p, const UnitaryMatrix& target, const DeviceConfig& cfg, double h) {
  const int n = p.n_steps();
  RealVector fd(2 * n);
  for (int q = 0; q < 2; ++q) {
    for (int k = 0; k < n; ++k) {
      ControlPulse plus = p, minus = p;
      (q == 0 ? plus.eps_i : plus.eps_q)(k) += h;
      (q == 0 ? minus.eps_i : minus.eps_q)(k) -= h;
      fd(q * n + k) = (infidelity(plus, target, cfg) - infidelity(minus, target, cfg)) / (2.0 * h);
    }
  }
  return fd;
}

TEST(Gradient, MatchesCentralDifferences) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 12; ++trial) {
    const int logical = 2 + trial % 2;
    const DeviceConfig cfg = device(logical + (trial % 3 == 0 ? 1 : 0), 8 + 4 * (trial % 4));
    const UnitaryMatrix target = random_unitary(logical, rng);
    const ControlPulse p = random_pulse(cfg, 0.2, 1000 + trial);
    const InfidelityGradient g = infidelity_gradient(p, target, cfg);
    RealVector analytic(2 * cfg.n_steps);
    analytic << g.d_eps_i, g.d_eps_q;
    const RealVector fd = finite_difference(p, target, cfg, 1e-6);
    const double rel = (analytic - fd).cwiseAbs().maxCoeff() / fd.cwiseAbs().maxCoeff();
    EXPECT_LT(rel, 1e-5) << "trial " << trial;
    EXPECT_NEAR(g.infidelity, infidelity(p, target, cfg), 1e-14);
  }
}

TEST(Gradient, VanishesAtExactSolution) {
  const DeviceConfig cfg = device(2, 20);
  const InfidelityGradient g =
      infidelity_gradient(ControlPulse::zeros(cfg), ComplexMatrix::Identity(2, 2), cfg);
  EXPECT_NEAR(g.infidelity, 0.0, 1e-15);
  EXPECT_LT(g.d_eps_i.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(g.d_eps_q.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Infidelity, ZeroPulseAgainstPauliX) {
  const DeviceConfig cfg = device(2, 10);
  ComplexMatrix x(2, 2);
  x << 0, 1, 1, 0;
  EXPECT_NEAR(infidelity(ControlPulse::zeros(cfg), x, cfg), 1.0, 1e-15);
}

TEST(Infidelity, RejectsOversizedTarget) {
  const DeviceConfig cfg = device(2, 10);
  EXPECT_THROW(infidelity(ControlPulse::zeros(cfg), ComplexMatrix::Identity(3, 3), cfg), ValidationError);
}

TEST(Optimize, HydrogenStepFromZeroGuess) {
  const DeviceConfig cfg = device(2, 400);
  const UnitaryMatrix target = target_propagator(build_model(StoBasis::sto2g(), 1.0), 1.0);
  GrapeSettings s;
  const OptimizationResult r = optimize_pulse(target, cfg, s, ControlPulse::zeros(cfg));
  EXPECT_TRUE(r.converged);
  EXPECT_GE(r.final_fidelity, 0.9999);
  EXPECT_LE(r.iterations, s.max_iterations);
  EXPECT_EQ(r.stop_reason, "target_reached");
  EXPECT_NEAR(1.0 - infidelity(r.pulse, target, cfg), r.final_fidelity, 1e-12);
}

TEST(Optimize, TraceIsMonotone) {
  const DeviceConfig cfg = device(3, 120);
  std::mt19937_64 rng(5);
  GrapeSettings s;
  s.max_iterations = 60;
  const OptimizationResult r = optimize_pulse(random_unitary(2, rng), cfg, s, random_pulse(cfg, 0.05, 3));
  ASSERT_FALSE(r.infidelity_trace.empty());
  for (std::size_t i = 1; i < r.infidelity_trace.size(); ++i) {
    EXPECT_LE(r.infidelity_trace[i], r.infidelity_trace[i - 1]);
  }
}

TEST(Optimize, DifferentSeedsBothConverge) {
  const DeviceConfig cfg = device(2, 400);
  const UnitaryMatrix target = target_propagator(build_model(StoBasis::sto2g(), 1.0), 1.0);
  GrapeSettings s;
  const OptimizationResult a = optimize_pulse(target, cfg, s, random_pulse(cfg, 0.05, 1));
  const OptimizationResult b = optimize_pulse(target, cfg, s, random_pulse(cfg, 0.05, 2));
  EXPECT_TRUE(a.converged);
  EXPECT_TRUE(b.converged);
  EXPECT_GT(pulse_rms_distance(a.pulse, b.pulse), 0.0);
}

TEST(Optimize, AmplitudeBoundIsRespected) {
  const DeviceConfig cfg = device(2, 200);
  const UnitaryMatrix target = target_propagator(build_model(StoBasis::sto2g(), 1.0), 2.0);
  GrapeSettings s;
  s.amplitude_bound = 0.05;
  const OptimizationResult r = optimize_pulse(target, cfg, s, ControlPulse::zeros(cfg));
  EXPECT_NO_THROW(r.pulse.validate(0.05));
  EXPECT_GT(r.final_fidelity, 0.99);
}

TEST(Optimize, NonConvergenceIsReportedNotThrown) {
  const DeviceConfig cfg = device(2, 100);
  // A partial x rotation keeps the gradient at the zero pulse away from zero.
  ComplexMatrix w(2, 2);
  const double c = std::cos(std::numbers::pi / 6.0), sn = std::sin(std::numbers::pi / 6.0);
  w << c, Complex(0, -sn), Complex(0, -sn), c;
  GrapeSettings s;
  s.max_iterations = 1;
  const OptimizationResult r = optimize_pulse(w, cfg, s, ControlPulse::zeros(cfg));
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.stop_reason, "max_iterations");
}

TEST(Optimize, RejectsBadSettings) {
  const DeviceConfig cfg = device(2, 10);
  GrapeSettings s;
  s.target_infidelity = 0.0;
  EXPECT_THROW(optimize_pulse(ComplexMatrix::Identity(2, 2), cfg, s, ControlPulse::zeros(cfg)), ValidationError);
  s = {};
  EXPECT_THROW(optimize_pulse(ComplexMatrix::Identity(2, 2), cfg, s, ControlPulse::zeros(device(2, 11))),
               ValidationError);
}

TEST(RandomPulse, ReproducibleFromSeed) {
  const DeviceConfig cfg = device(2, 50);
  EXPECT_EQ(random_pulse(cfg, 0.1, 7).eps_i, random_pulse(cfg, 0.1, 7).eps_i);
  EXPECT_NE(random_pulse(cfg, 0.1, 7).eps_i, random_pulse(cfg, 0.1, 8).eps_i);
  EXPECT_LE(random_pulse(cfg, 0.1, 7).eps_q.cwiseAbs().maxCoeff(), 0.1);
}

std::vector<std::pair<double, UnitaryMatrix>> dt_targets(const std::vector<double>& grid) {
  const HydrogenModel m = build_model(StoBasis::sto2g(), 1.0);
  std::vector<std::pair<double, UnitaryMatrix>> out;
  for (double dt : grid) out.emplace_back(dt, target_propagator(m, dt));
  return out;
}

TEST(Sweep, SinglePointEqualsOptimizeFromZero) {
  const DeviceConfig cfg = device(2, 200);
  GrapeSettings s;
  const auto targets = dt_targets({1.5});
  const PulseFamily f = sweep_family("dt", targets, cfg, s);
  const OptimizationResult r = optimize_pulse(targets[0].second, cfg, s, ControlPulse::zeros(cfg));
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f.pulses[0].eps_i, r.pulse.eps_i);
  EXPECT_EQ(f.pulses[0].eps_q, r.pulse.eps_q);
}

TEST(Sweep, WarmStartKeepsFamilyContinuous) {
  const DeviceConfig cfg = device(2, 200);
  const auto targets = dt_targets({1.0, 1.5, 2.0, 2.5});
  GrapeSettings warm;
  GrapeSettings cold;
  cold.warm_start = false;
  cold.seed = 17;
  const PulseFamily fw = sweep_family("dt", targets, cfg, warm);
  const PulseFamily fc = sweep_family("dt", targets, cfg, cold);
  EXPECT_TRUE(fw.non_converged().empty());
  EXPECT_TRUE(fc.non_converged().empty());
  double warm_gap = 0.0, cold_gap = 0.0;
  for (std::size_t i = 1; i < fw.size(); ++i) {
    warm_gap += pulse_rms_distance(fw.pulses[i], fw.pulses[i - 1]);
    cold_gap += pulse_rms_distance(fc.pulses[i], fc.pulses[i - 1]);
  }
  EXPECT_LT(warm_gap, cold_gap);
}

TEST(Sweep, FlagsNonConvergedMembers) {
  const DeviceConfig cfg = device(2, 50);
  GrapeSettings s;
  s.max_iterations = 1;
  s.target_infidelity = 1e-12;
  const PulseFamily f = sweep_family("dt", dt_targets({1.0, 2.0}), cfg, s);
  EXPECT_EQ(f.non_converged().size(), 2u);
}

TEST(Sweep, RejectsNonIncreasingGrid) {
  const DeviceConfig cfg = device(2, 10);
  EXPECT_THROW(sweep_family("dt", dt_targets({1.0, 1.0}), cfg, {}), ValidationError);
  EXPECT_THROW(sweep_family("dt", dt_targets({2.0, 1.0}), cfg, {}), ValidationError);
  EXPECT_THROW(sweep_family("dt", {}, cfg, {}), ValidationError);
}

}  // namespace
}  // namespace cprlab
