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

struct PulseSpectrum {
  ComplexVector in_phase;
  ComplexVector quadrature;
};

/// Unitary DFT (1/sqrt(N) both ways) of each quadrature.
PulseSpectrum fft_pulse(const ControlPulse& pulse);

/// Inverse of fft_pulse. Throws NumericalError if the time-domain signal keeps an
/// imaginary part larger than 1e-9, which means the spectrum was not Hermitian.
ControlPulse inverse_fft(const PulseSpectrum& spectrum, double tau_ns);

/// X[k] <- (X[k] + conj(X[-k])) / 2.
ComplexVector hermitian_symmetrize(const ComplexVector& spectrum);

// End conditions for the per-bin cubic splines. Natural ends pin the second
// derivative to zero; not-a-knot ends keep the third derivative continuous
// next to each end, which reproduces any cubic (and so any quadratic) exactly.
enum class SplineEnds { Natural, NotAKnot };
const char* to_string(SplineEnds ends);
SplineEnds spline_ends_from_string(const std::string& name);

// Second derivatives at the knots of the cubic spline through
// (knots[i], values.row(i)), column-wise so one solve serves every frequency
// bin. Two knots give straight lines whatever the end condition.
RealMatrix spline_moments(const std::vector<double>& knots, const RealMatrix& values,
                          SplineEnds ends = SplineEnds::NotAKnot);

// A spline value at x is w.y0 y_i + w.y1 y_{i+1} + w.m0 M_i + w.m1 M_{i+1}.
// Outside the knot span the spline continues linearly.
struct SplineWeights {
  Eigen::Index interval = 0;
  double y0 = 0.0, y1 = 0.0, m0 = 0.0, m1 = 0.0;
};
SplineWeights spline_weights(const std::vector<double>& knots, double x);

// Per-bin spline interpolation of pulse spectra across the family grid.
struct SpectralPulseModel {
  std::string parameter_name;
  std::vector<double> grid;
  int n_steps = 0;
  double tau_ns = 0.0;
  SplineEnds ends = SplineEnds::NotAKnot;
  // Rows are family members, columns frequency bins; index 0 = I, 1 = Q.
  std::array<ComplexMatrix, 2> spectra;
  std::array<RealMatrix, 2> moments_re;
  std::array<RealMatrix, 2> moments_im;
  nlohmann::json context = nlohmann::json::object();

  double param_min() const { return grid.front(); }
  double param_max() const { return grid.back(); }

  /// Interpolated (and Hermitian-symmetrized) spectrum at lambda.
  PulseSpectrum spectrum_at(double lambda, bool extrapolate = false) const;
  ControlPulse reconstruct(double lambda, bool extrapolate = false) const;

  /// Inverse transform of the stored spectrum of member i, without interpolation.
  ControlPulse member_pulse(std::size_t i) const;

  nlohmann::json to_json() const;
  static SpectralPulseModel from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static SpectralPulseModel load(const std::filesystem::path& path);
};

/// Throws ValidationError for fewer than two members or repeated grid values.
SpectralPulseModel fit_spectral_model(const PulseFamily& family, SplineEnds ends = SplineEnds::NotAKnot);

}  // namespace cprlab
