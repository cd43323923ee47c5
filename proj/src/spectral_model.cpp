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

#include "cprlab/spectral_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include <unsupported/Eigen/FFT>

#include "cprlab/errors.hpp"

namespace cprlab {
namespace {

constexpr double kImagResidueTol = 1e-9;
constexpr double kDomainSlack = 1e-12;

ComplexVector dft(const ComplexVector& x, bool inverse) {
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  std::vector<Complex> in(x.data(), x.data() + x.size());
  std::vector<Complex> out;
  if (inverse) {
    fft.inv(out, in);
  } else {
    fft.fwd(out, in);
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(x.size()));
  ComplexVector y(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) y(k) = out[k] * scale;
  return y;
}

RealVector real_part_checked(const ComplexVector& x) {
  const double residue = x.size() ? x.imag().cwiseAbs().maxCoeff() : 0.0;
  if (residue > kImagResidueTol) {
    throw NumericalError("inverse transform left an imaginary residue of " + std::to_string(residue) +
                         "; spectrum is not Hermitian-symmetric");
  }
  return x.real();
}

nlohmann::json real_rows(const RealMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    rows.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
  }
  return rows;
}

RealMatrix real_rows_from(const nlohmann::json& j, Eigen::Index rows, Eigen::Index cols) {
  if (static_cast<Eigen::Index>(j.size()) != rows) throw ValidationError("spectral model has wrong shape");
  RealMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto row = j.at(r).get<std::vector<double>>();
    if (static_cast<Eigen::Index>(row.size()) != cols) throw ValidationError("spectral model has wrong shape");
    m.row(r) = Eigen::Map<const Eigen::RowVectorXd>(row.data(), cols);
  }
  return m;
}

}  // namespace

PulseSpectrum fft_pulse(const ControlPulse& pulse) {
  pulse.validate();
  return {dft(pulse.eps_i.cast<Complex>(), false), dft(pulse.eps_q.cast<Complex>(), false)};
}

ControlPulse inverse_fft(const PulseSpectrum& spectrum, double tau_ns) {
  if (spectrum.in_phase.size() != spectrum.quadrature.size() || spectrum.in_phase.size() == 0) {
    throw ValidationError("spectrum quadratures differ in length");
  }
  return {real_part_checked(dft(spectrum.in_phase, true)), real_part_checked(dft(spectrum.quadrature, true)),
          tau_ns};
}

ComplexVector hermitian_symmetrize(const ComplexVector& x) {
  const Eigen::Index n = x.size();
  ComplexVector y(n);
  for (Eigen::Index k = 0; k < n; ++k) y(k) = 0.5 * (x(k) + std::conj(x((n - k) % n)));
  return y;
}

const char* to_string(SplineEnds ends) {
  return ends == SplineEnds::Natural ? "natural" : "not_a_knot";
}

SplineEnds spline_ends_from_string(const std::string& name) {
  if (name == "natural") return SplineEnds::Natural;
  if (name == "not_a_knot") return SplineEnds::NotAKnot;
  throw ValidationError("unknown spline end condition '" + name + "' (expected natural or not_a_knot)");
}

RealMatrix spline_moments(const std::vector<double>& knots, const RealMatrix& values, SplineEnds ends) {
  const Eigen::Index n = static_cast<Eigen::Index>(knots.size());
  if (n < 2 || values.rows() != n) throw ValidationError("spline needs at least two knots matching the data");
  if (n == 2) return RealMatrix::Zero(n, values.cols());

  // Continuity of the first derivative at interior knots, plus one condition per end.
  // Grids here hold a few dozen knots at most, so a dense LU is plenty.
  RealMatrix a = RealMatrix::Zero(n, n);
  RealMatrix rhs = RealMatrix::Zero(n, values.cols());
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    const double h0 = knots[i] - knots[i - 1];
    const double h1 = knots[i + 1] - knots[i];
    a(i, i - 1) = h0 / 6.0;
    a(i, i) = (h0 + h1) / 3.0;
    a(i, i + 1) = h1 / 6.0;
    rhs.row(i) = (values.row(i + 1) - values.row(i)) / h1 - (values.row(i) - values.row(i - 1)) / h0;
  }
  if (ends == SplineEnds::Natural) {
    a(0, 0) = 1.0;
    a(n - 1, n - 1) = 1.0;
  } else if (n == 3) {
    // One interior knot: not-a-knot collapses to the interpolating parabola.
    a(0, 0) = 1.0;
    a(0, 1) = -1.0;
    a(2, 1) = -1.0;
    a(2, 2) = 1.0;
  } else {
    // Third derivative continuous across the second and the second-to-last knot.
    const double h0 = knots[1] - knots[0], h1 = knots[2] - knots[1];
    a(0, 0) = h1;
    a(0, 1) = -(h0 + h1);
    a(0, 2) = h0;
    const double g0 = knots[n - 2] - knots[n - 3], g1 = knots[n - 1] - knots[n - 2];
    a(n - 1, n - 3) = g1;
    a(n - 1, n - 2) = -(g0 + g1);
    a(n - 1, n - 1) = g0;
  }
  return a.partialPivLu().solve(rhs);
}

SplineWeights spline_weights(const std::vector<double>& knots, double x) {
  const Eigen::Index last = static_cast<Eigen::Index>(knots.size()) - 1;
  if (x <= knots.front()) {
    const double h = knots[1] - knots[0];
    const double d = x - knots[0];
    return {0, 1.0 - d / h, d / h, -d * h / 3.0, -d * h / 6.0};
  }
  if (x >= knots.back()) {
    const double h = knots[last] - knots[last - 1];
    const double d = x - knots[last];
    return {last - 1, -d / h, 1.0 + d / h, d * h / 6.0, d * h / 3.0};
  }
  const auto it = std::upper_bound(knots.begin(), knots.end(), x);
  const Eigen::Index i = std::distance(knots.begin(), it) - 1;
  const double h = knots[i + 1] - knots[i];
  const double a = (knots[i + 1] - x) / h;
  const double b = 1.0 - a;
  return {i, a, b, (a * a * a - a) * h * h / 6.0, (b * b * b - b) * h * h / 6.0};
}

PulseSpectrum SpectralPulseModel::spectrum_at(double lambda, bool extrapolate) const {
  if (!std::isfinite(lambda)) throw ValidationError("parameter value must be finite");
  const double slack = kDomainSlack * std::max(1.0, std::abs(param_max()));
  if (!extrapolate && (lambda < param_min() - slack || lambda > param_max() + slack)) {
    throw ValidationError("parameter " + std::to_string(lambda) + " is outside the fitted domain [" +
                          std::to_string(param_min()) + ", " + std::to_string(param_max()) +
                          "]; pass extrapolate to allow it");
  }
  const SplineWeights w = spline_weights(grid, lambda);
  const Eigen::Index i = w.interval;
  std::array<ComplexVector, 2> out;
  for (int q = 0; q < 2; ++q) {
    const RealVector re = w.y0 * spectra[q].row(i).real().transpose() +
                          w.y1 * spectra[q].row(i + 1).real().transpose() +
                          w.m0 * moments_re[q].row(i).transpose() + w.m1 * moments_re[q].row(i + 1).transpose();
    const RealVector im = w.y0 * spectra[q].row(i).imag().transpose() +
                          w.y1 * spectra[q].row(i + 1).imag().transpose() +
                          w.m0 * moments_im[q].row(i).transpose() + w.m1 * moments_im[q].row(i + 1).transpose();
    ComplexVector z(re.size());
    z.real() = re;
    z.imag() = im;
    out[q] = hermitian_symmetrize(z);
  }
  return {out[0], out[1]};
}

ControlPulse SpectralPulseModel::reconstruct(double lambda, bool extrapolate) const {
  return inverse_fft(spectrum_at(lambda, extrapolate), tau_ns);
}

ControlPulse SpectralPulseModel::member_pulse(std::size_t i) const {
  if (i >= grid.size()) throw ValidationError("member index out of range");
  return inverse_fft({spectra[0].row(i).transpose(), spectra[1].row(i).transpose()}, tau_ns);
}

SpectralPulseModel fit_spectral_model(const PulseFamily& family, SplineEnds ends) {
  if (family.size() < 2) throw ValidationError("spectral interpolation needs at least two family members");
  for (std::size_t i = 1; i < family.size(); ++i) {
    if (family.parameter_values[i] == family.parameter_values[i - 1]) {
      throw ValidationError("duplicate parameter value " + std::to_string(family.parameter_values[i]));
    }
  }
  family.validate();

  SpectralPulseModel model;
  model.parameter_name = family.parameter_name;
  model.grid = family.parameter_values;
  model.n_steps = family.pulses.front().n_steps();
  model.tau_ns = family.pulses.front().tau_ns;
  model.ends = ends;
  const Eigen::Index members = static_cast<Eigen::Index>(family.size());
  for (int q = 0; q < 2; ++q) model.spectra[q].resize(members, model.n_steps);
  for (Eigen::Index i = 0; i < members; ++i) {
    const PulseSpectrum s = fft_pulse(family.pulses[i]);
    model.spectra[0].row(i) = s.in_phase.transpose();
    model.spectra[1].row(i) = s.quadrature.transpose();
  }
  for (int q = 0; q < 2; ++q) {
    model.moments_re[q] = spline_moments(model.grid, model.spectra[q].real(), ends);
    model.moments_im[q] = spline_moments(model.grid, model.spectra[q].imag(), ends);
  }
  return model;
}

nlohmann::json SpectralPulseModel::to_json() const {
  nlohmann::json bins;
  const char* names[2] = {"I", "Q"};
  for (int q = 0; q < 2; ++q) {
    bins[names[q]] = {{"re", real_rows(spectra[q].real())},
                      {"im", real_rows(spectra[q].imag())},
                      {"re_moments", real_rows(moments_re[q])},
                      {"im_moments", real_rows(moments_im[q])}};
  }
  return {{"kind", "spectral"},
          {"parameter_name", parameter_name},
          {"grid", grid},
          {"n_steps", n_steps},
          {"tau_ns", tau_ns},
          {"normalization", "unitary DFT"},
          {"interpolation", "cubic spline per bin (values and second derivatives at knots)"},
          {"spline_ends", to_string(ends)},
          {"bins", bins},
          {"context", context}};
}

SpectralPulseModel SpectralPulseModel::from_json(const nlohmann::json& j) {
  try {
    if (j.at("kind").get<std::string>() != "spectral") throw ValidationError("not a spectral model");
    SpectralPulseModel m;
    m.parameter_name = j.at("parameter_name").get<std::string>();
    m.grid = j.at("grid").get<std::vector<double>>();
    m.n_steps = j.at("n_steps").get<int>();
    m.tau_ns = j.at("tau_ns").get<double>();
    m.ends = spline_ends_from_string(j.at("spline_ends").get<std::string>());
    if (m.grid.size() < 2 || m.n_steps < 1 || !(m.tau_ns > 0.0)) {
      throw ValidationError("spectral model has an invalid grid");
    }
    const auto rows = static_cast<Eigen::Index>(m.grid.size());
    const char* names[2] = {"I", "Q"};
    for (int q = 0; q < 2; ++q) {
      const auto& b = j.at("bins").at(names[q]);
      const RealMatrix re = real_rows_from(b.at("re"), rows, m.n_steps);
      const RealMatrix im = real_rows_from(b.at("im"), rows, m.n_steps);
      m.spectra[q].resize(rows, m.n_steps);
      m.spectra[q].real() = re;
      m.spectra[q].imag() = im;
      m.moments_re[q] = real_rows_from(b.at("re_moments"), rows, m.n_steps);
      m.moments_im[q] = real_rows_from(b.at("im_moments"), rows, m.n_steps);
    }
    m.context = j.value("context", nlohmann::json::object());
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed spectral model: ") + e.what());
  }
}

void SpectralPulseModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write model file " + path.string());
  out << to_json().dump() << '\n';
}

SpectralPulseModel SpectralPulseModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("malformed model file " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

}  // namespace cprlab
