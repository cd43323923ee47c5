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

#include "cprlab/pulse_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cprlab/errors.hpp"

namespace cprlab {
namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, const std::filesystem::path& path) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("pulse file " + path.string() + ": bad number '" + s + "'");
  }
}

}  // namespace

void write_pulse_csv(const std::filesystem::path& path, const ControlPulse& pulse) {
  pulse.validate();
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write pulse file " + path.string());
  out << "# tau_ns=" << fmt17(pulse.duration()) << ", n_steps=" << pulse.n_steps() << '\n';
  out << "index,eps_I,eps_Q\n";
  for (int k = 0; k < pulse.n_steps(); ++k) {
    out << k << ',' << fmt17(pulse.eps_i(k)) << ',' << fmt17(pulse.eps_q(k)) << '\n';
  }
}

ControlPulse read_pulse_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open pulse file " + path.string());

  std::string line;
  std::getline(in, line);
  double tau = 0.0;
  int n = 0;
  char tau_buf[64] = {};
  if (std::sscanf(line.c_str(), "# tau_ns=%63[^,], n_steps=%d", tau_buf, &n) != 2 || n < 1) {
    throw ValidationError("pulse file " + path.string() + ": malformed header");
  }
  tau = parse_double(tau_buf, path);

  std::getline(in, line);
  if (line != "index,eps_I,eps_Q") {
    throw ValidationError("pulse file " + path.string() + ": missing column header");
  }

  ControlPulse pulse{RealVector(n), RealVector(n), tau};
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string idx, ei, eq;
    if (!std::getline(ss, idx, ',') || !std::getline(ss, ei, ',') || !std::getline(ss, eq)) {
      throw ValidationError("pulse file " + path.string() + ": malformed row '" + line + "'");
    }
    if (rows >= n || std::stoi(idx) != rows) {
      throw ValidationError("pulse file " + path.string() + ": row index out of sequence");
    }
    pulse.eps_i(rows) = parse_double(ei, path);
    pulse.eps_q(rows) = parse_double(eq, path);
    ++rows;
  }
  if (rows != n) {
    throw ValidationError("pulse file " + path.string() + ": expected " + std::to_string(n) + " rows, got " +
                          std::to_string(rows));
  }
  pulse.validate();
  return pulse;
}

nlohmann::json pulse_to_json(const ControlPulse& pulse) {
  return {{"tau_ns", pulse.duration()},
          {"n_steps", pulse.n_steps()},
          {"eps_I", std::vector<double>(pulse.eps_i.begin(), pulse.eps_i.end())},
          {"eps_Q", std::vector<double>(pulse.eps_q.begin(), pulse.eps_q.end())}};
}

ControlPulse pulse_from_json(const nlohmann::json& j) {
  try {
    const auto ei = j.at("eps_I").get<std::vector<double>>();
    const auto eq = j.at("eps_Q").get<std::vector<double>>();
    const int n = j.at("n_steps").get<int>();
    if (static_cast<int>(ei.size()) != n || static_cast<int>(eq.size()) != n) {
      throw ValidationError("pulse JSON: n_steps disagrees with envelope length");
    }
    ControlPulse p{Eigen::Map<const RealVector>(ei.data(), n), Eigen::Map<const RealVector>(eq.data(), n),
                   j.at("tau_ns").get<double>()};
    p.validate();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("pulse JSON: ") + e.what());
  }
}

nlohmann::json device_to_json(const DeviceConfig& cfg) {
  return {{"dim", cfg.dim},
          {"alpha_T_over_2pi_ghz", cfg.anharmonicity_over_2pi_ghz},
          {"tau_ns", cfg.pulse_duration_ns},
          {"n_steps", cfg.n_steps},
          {"sample_rate_ghz", cfg.sample_rate_ghz()}};
}

DeviceConfig device_from_json(const nlohmann::json& j) {
  try {
    DeviceConfig cfg;
    cfg.dim = j.at("dim").get<int>();
    cfg.anharmonicity_over_2pi_ghz = j.at("alpha_T_over_2pi_ghz").get<double>();
    cfg.pulse_duration_ns = j.at("tau_ns").get<double>();
    cfg.n_steps = j.at("n_steps").get<int>();
    cfg.validate(2);
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("device JSON: ") + e.what());
  }
}

}  // namespace cprlab
