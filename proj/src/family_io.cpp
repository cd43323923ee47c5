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

#include "cprlab/family_io.hpp"

#include <cstdio>
#include <fstream>

#include "cprlab/errors.hpp"
#include "cprlab/pulse_io.hpp"

namespace cprlab {

std::string pulse_filename(const std::string& parameter_name, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return "pulse_" + parameter_name + "_" + buf + ".csv";
}

nlohmann::json settings_to_json(const GrapeSettings& s) {
  return {{"target_infidelity", s.target_infidelity},
          {"max_iterations", s.max_iterations},
          {"gradient_tolerance", s.gradient_tolerance},
          {"warm_start", s.warm_start},
          {"seed", s.seed},
          {"lbfgs_history", s.lbfgs_history},
          {"amplitude_bound", s.amplitude_bound},
          {"random_guess_amplitude", s.random_guess_amplitude}};
}

GrapeSettings settings_from_json(const nlohmann::json& j) {
  GrapeSettings s;
  try {
    s.target_infidelity = j.at("target_infidelity").get<double>();
    s.max_iterations = j.at("max_iterations").get<int>();
    s.gradient_tolerance = j.at("gradient_tolerance").get<double>();
    s.warm_start = j.at("warm_start").get<bool>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.lbfgs_history = j.value("lbfgs_history", s.lbfgs_history);
    s.amplitude_bound = j.value("amplitude_bound", s.amplitude_bound);
    s.random_guess_amplitude = j.value("random_guess_amplitude", s.random_guess_amplitude);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("optimizer settings: ") + e.what());
  }
  s.validate();
  return s;
}

void save_family(const std::filesystem::path& dir, const PulseFamily& family, const nlohmann::json& context) {
  family.validate();
  std::filesystem::create_directories(dir);

  nlohmann::json members = nlohmann::json::array();
  for (std::size_t i = 0; i < family.size(); ++i) {
    const std::string file = pulse_filename(family.parameter_name, family.parameter_values[i]);
    write_pulse_csv(dir / file, family.pulses[i]);
    nlohmann::json m{{"value", family.parameter_values[i]}, {"file", file}};
    if (i < family.results.size()) {
      const auto& r = family.results[i];
      m["final_fidelity"] = r.final_fidelity;
      m["iterations"] = r.iterations;
      m["converged"] = r.converged;
      m["stop_reason"] = r.stop_reason;
      m["wall_time_s"] = r.wall_time;
    }
    members.push_back(std::move(m));
  }
  const nlohmann::json j{{"parameter_name", family.parameter_name},
                         {"parameter_values", family.parameter_values},
                         {"device", device_to_json(family.device)},
                         {"settings", settings_to_json(family.settings)},
                         {"members", members},
                         {"context", context}};
  std::ofstream out(dir / "family.json");
  if (!out) throw ValidationError("cannot write " + (dir / "family.json").string());
  out << j.dump(2) << '\n';
}

LoadedFamily load_family(const std::filesystem::path& dir) {
  const auto index = dir / "family.json";
  std::ifstream in(index);
  if (!in) throw ValidationError("no family archive at " + dir.string());
  LoadedFamily out;
  try {
    nlohmann::json j;
    in >> j;
    PulseFamily& f = out.family;
    f.parameter_name = j.at("parameter_name").get<std::string>();
    f.parameter_values = j.at("parameter_values").get<std::vector<double>>();
    f.device = device_from_json(j.at("device"));
    f.settings = settings_from_json(j.at("settings"));
    for (const auto& m : j.at("members")) {
      f.pulses.push_back(read_pulse_csv(dir / m.at("file").get<std::string>()));
      if (m.contains("final_fidelity")) {
        OptimizationResult r;
        r.pulse = f.pulses.back();
        r.final_fidelity = m.at("final_fidelity").get<double>();
        r.iterations = m.at("iterations").get<int>();
        r.converged = m.at("converged").get<bool>();
        r.stop_reason = m.value("stop_reason", "");
        r.wall_time = m.value("wall_time_s", 0.0);
        f.results.push_back(std::move(r));
      }
    }
    out.context = j.value("context", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("malformed family archive " + index.string() + ": " + e.what());
  }
  out.family.validate();
  return out;
}

}  // namespace cprlab
