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

#include "cprlab/poly_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <fstream>
#include <string>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "cprlab/errors.hpp"

namespace cprlab {
namespace {

constexpr double kMaxCondition = 1e12;
constexpr double kDomainSlack = 1e-12;

double condition_number(const RealMatrix& a) {
  Eigen::JacobiSVD<RealMatrix> svd(a);
  const auto& sv = svd.singularValues();
  return sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
}

// QR least squares with the rank and conditioning checks shared by both fit levels.
class LeastSquares {
 public:
  LeastSquares(const RealMatrix& design, const char* label) : qr_(design) {
    condition_ = condition_number(design);
    if (qr_.rank() < design.cols() || condition_ > kMaxCondition) {
      throw NumericalError(std::string(label) + " fit is ill-conditioned (rank " + std::to_string(qr_.rank()) +
                           " of " + std::to_string(design.cols()) + ", condition estimate " +
                           std::to_string(condition_) + ")");
    }
  }
  RealMatrix solve(const RealMatrix& rhs) const { return qr_.solve(rhs); }
  double condition() const { return condition_; }

 private:
  Eigen::ColPivHouseholderQR<RealMatrix> qr_;
  double condition_ = 0.0;
};

RealVector unit_times(int n_steps) {
  // Midpoints (k + 1/2) tau / N mapped onto [-1, 1].
  RealVector s(n_steps);
  for (int k = 0; k < n_steps; ++k) s(k) = (2.0 * k + 1.0) / n_steps - 1.0;
  return s;
}

double rms(const RealVector& v) {
  return v.size() ? std::sqrt(v.squaredNorm() / static_cast<double>(v.size())) : 0.0;
}

nlohmann::json matrix_to_json(const RealMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<double> row(m.cols());
    for (Eigen::Index c = 0; c < m.cols(); ++c) row[c] = m(r, c);
    rows.push_back(row);
  }
  return rows;
}

RealMatrix matrix_from_json(const nlohmann::json& j, Eigen::Index rows, Eigen::Index cols) {
  if (static_cast<Eigen::Index>(j.size()) != rows) throw ValidationError("coefficient tensor has wrong shape");
  RealMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto row = j.at(r).get<std::vector<double>>();
    if (static_cast<Eigen::Index>(row.size()) != cols) throw ValidationError("coefficient tensor has wrong shape");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[c];
  }
  return m;
}

}  // namespace

RealMatrix vandermonde(const RealVector& x, int degree) {
  RealMatrix v(x.size(), degree + 1);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double p = 1.0;
    for (int j = 0; j <= degree; ++j) {
      v(i, j) = p;
      p *= x(i);
    }
  }
  return v;
}

RealVector PolyPulseModel::time_coefficients(int quadrature, double lambda) const {
  const RealVector powers = vandermonde(RealVector::Constant(1, param_domain.to_unit(lambda)), degree_param).row(0);
  return coefficients.at(quadrature) * powers;
}

ControlPulse PolyPulseModel::reconstruct(double lambda, bool extrapolate) const {
  if (!std::isfinite(lambda)) throw ValidationError("parameter value must be finite");
  const double slack = kDomainSlack * std::max(1.0, std::abs(param_domain.hi));
  if (!extrapolate && (lambda < param_domain.lo - slack || lambda > param_domain.hi + slack)) {
    throw ValidationError("parameter " + std::to_string(lambda) + " is outside the fitted domain [" +
                          std::to_string(param_domain.lo) + ", " + std::to_string(param_domain.hi) +
                          "]; pass extrapolate to allow it");
  }
  const RealMatrix vt = vandermonde(unit_times(n_steps), degree_time);
  return {vt * time_coefficients(0, lambda), vt * time_coefficients(1, lambda), tau_ns};
}

PolyPulseModel fit_poly_model(const PulseFamily& family, int degree_time, int degree_param) {
  family.validate();
  if (degree_time < 0 || degree_param < 0) throw ValidationError("polynomial degrees must be non-negative");
  const int members = static_cast<int>(family.size());
  if (members < degree_param + 1) {
    throw ValidationError("family of " + std::to_string(members) + " members cannot determine a degree-" +
                          std::to_string(degree_param) + " parameter fit");
  }
  const int n = family.pulses.front().n_steps();
  if (n < degree_time + 1) {
    throw ValidationError("pulses with " + std::to_string(n) + " samples cannot determine a degree-" +
                          std::to_string(degree_time) + " time fit");
  }

  PolyPulseModel model;
  model.parameter_name = family.parameter_name;
  model.degree_time = degree_time;
  model.degree_param = degree_param;
  model.n_steps = n;
  model.tau_ns = family.pulses.front().tau_ns;
  model.param_domain = {family.parameter_values.front(), family.parameter_values.back()};

  const RealMatrix vt = vandermonde(unit_times(n), degree_time);
  const LeastSquares time_fit(vt, "time");

  RealVector u(members);
  for (int i = 0; i < members; ++i) u(i) = model.param_domain.to_unit(family.parameter_values[i]);
  const RealMatrix vp = vandermonde(u, degree_param);
  const LeastSquares param_fit(vp, "parameter");

  model.diagnostics.time_condition = time_fit.condition();
  model.diagnostics.param_condition = param_fit.condition();

  for (int q = 0; q < 2; ++q) {
    RealMatrix samples(n, members);
    for (int i = 0; i < members; ++i) {
      samples.col(i) = q == 0 ? family.pulses[i].eps_i : family.pulses[i].eps_q;
    }
    const RealMatrix c = time_fit.solve(samples);  // (degree_time + 1) x members
    const RealMatrix residual = vt * c - samples;
    for (int i = 0; i < members; ++i) model.diagnostics.time_fit_rms[q].push_back(rms(residual.col(i)));

    // c_j across the grid: solve vp * b_j = c_j^T for all j at once.
    const RealMatrix b = param_fit.solve(c.transpose());  // (degree_param + 1) x (degree_time + 1)
    model.coefficients[q] = b.transpose();
    const RealMatrix c_residual = vp * b - c.transpose();
    double worst = 0.0;
    for (Eigen::Index j = 0; j < c_residual.cols(); ++j) worst = std::max(worst, rms(c_residual.col(j)));
    model.diagnostics.param_fit_rms[q] = worst;
  }
  return model;
}

nlohmann::json PolyPulseModel::to_json() const {
  return {{"kind", "poly"},
          {"parameter_name", parameter_name},
          {"degree_time", degree_time},
          {"degree_param", degree_param},
          {"n_steps", n_steps},
          {"time_domain_ns", {0.0, tau_ns}},
          {"param_domain", {param_domain.lo, param_domain.hi}},
          {"coordinates", "time and parameter mapped affinely onto [-1, 1]"},
          {"coefficients", {{"I", matrix_to_json(coefficients[0])}, {"Q", matrix_to_json(coefficients[1])}}},
          {"diagnostics",
           {{"time_fit_rms_I", diagnostics.time_fit_rms[0]},
            {"time_fit_rms_Q", diagnostics.time_fit_rms[1]},
            {"param_fit_rms_I", diagnostics.param_fit_rms[0]},
            {"param_fit_rms_Q", diagnostics.param_fit_rms[1]},
            {"time_condition", diagnostics.time_condition},
            {"param_condition", diagnostics.param_condition}}},
          {"context", context}};
}

PolyPulseModel PolyPulseModel::from_json(const nlohmann::json& j) {
  try {
    if (j.at("kind").get<std::string>() != "poly") throw ValidationError("not a polynomial model");
    PolyPulseModel m;
    m.parameter_name = j.at("parameter_name").get<std::string>();
    m.degree_time = j.at("degree_time").get<int>();
    m.degree_param = j.at("degree_param").get<int>();
    m.n_steps = j.at("n_steps").get<int>();
    m.tau_ns = j.at("time_domain_ns").at(1).get<double>();
    m.param_domain = {j.at("param_domain").at(0).get<double>(), j.at("param_domain").at(1).get<double>()};
    if (m.degree_time < 0 || m.degree_param < 0 || m.n_steps < 1 || !(m.tau_ns > 0.0)) {
      throw ValidationError("polynomial model has invalid degrees or time grid");
    }
    const auto& c = j.at("coefficients");
    m.coefficients[0] = matrix_from_json(c.at("I"), m.degree_time + 1, m.degree_param + 1);
    m.coefficients[1] = matrix_from_json(c.at("Q"), m.degree_time + 1, m.degree_param + 1);
    if (j.contains("diagnostics")) {
      const auto& d = j.at("diagnostics");
      m.diagnostics.time_fit_rms[0] = d.at("time_fit_rms_I").get<std::vector<double>>();
      m.diagnostics.time_fit_rms[1] = d.at("time_fit_rms_Q").get<std::vector<double>>();
      m.diagnostics.param_fit_rms = {d.at("param_fit_rms_I").get<double>(), d.at("param_fit_rms_Q").get<double>()};
      m.diagnostics.time_condition = d.at("time_condition").get<double>();
      m.diagnostics.param_condition = d.at("param_condition").get<double>();
    }
    m.context = j.value("context", nlohmann::json::object());
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed polynomial model: ") + e.what());
  }
}

void PolyPulseModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write model file " + path.string());
  out << to_json().dump(2) << '\n';
}

PolyPulseModel PolyPulseModel::load(const std::filesystem::path& path) {
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
