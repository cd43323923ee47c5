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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cprlab/grape.hpp"
#include "cprlab/sim_harness.hpp"

namespace cprlab::cli {

// Flat run configuration. Keys carry their units so a file cannot silently mix
// ns with inverse Hartree. Every field has a default; unknown keys are errors.
struct RunConfig {
  // Target family
  std::string basis = "sto-2g";  // sto-2g, sto-3g or a basis JSON file
  std::string parameter = "dt";  // dt or m_e
  std::vector<double> grid;
  double dt_hartree_inv = 1.0;  // fixed step when sweeping m_e
  double m_e = 1.0;             // fixed mass when sweeping dt

  // Device
  int device_dim = 2;
  double alpha_T_over_2pi_ghz = 2.1693;
  double tau_ns = 50.0;
  int n_steps = 1600;

  // Optimizer
  double target_infidelity = 1e-6;
  int max_iterations = 500;
  double gradient_tolerance = 1e-12;
  bool warm_start = true;
  int lbfgs_history = 20;
  double amplitude_bound_rad_per_ns = 0.0;
  double random_guess_amplitude_rad_per_ns = 0.05;
  std::uint64_t seed = 0;

  // Reconstruction
  std::string method = "poly";  // poly or spectral
  int degree_time = 10;
  int degree_param = 4;
  std::string spline_ends = "not_a_knot";

  // Verification, timing and evolution
  std::vector<double> holdout;
  std::vector<double> bench_samples;
  std::string schedule = "sin";  // sin (mass schedule) or none (fixed parameter)
  int n_max = 40;
  double schedule_amplitude = 0.2;
  double schedule_base = 1.0;
  std::optional<double> evolve_lambda;
  int evolve_steps = 40;
  std::string initial_state = "contraction";  // contraction, ground or a level index

  // Files
  std::string out_dir = "out";
  std::string family_dir;
  std::string model_file;

  nlohmann::json to_json() const;
  /// Starts from the defaults and applies every key of `j`; unknown keys and
  /// wrong types raise ValidationError.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::filesystem::path& path);

  StoBasis basis_set() const;
  HydrogenTargets targets() const;
  DeviceConfig device() const;
  GrapeSettings settings() const;
  /// Checks the fields shared by every command against the module invariants.
  void validate() const;
};

/// 64-bit FNV-1a of a byte string.
std::uint64_t fnv1a64(const std::string& bytes);

/// Parses argv and runs one subcommand. Returns the process exit code:
/// 0 success, 2 validation error, 3 numerical failure.
int run(int argc, char** argv);

}  // namespace cprlab::cli
