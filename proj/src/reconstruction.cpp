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

#include "cprlab/reconstruction.hpp"

#include <fstream>

#include "cprlab/errors.hpp"

namespace cprlab {

ControlPulse reconstruct(const PulseModel& model, double lambda, bool extrapolate) {
  return std::visit([&](const auto& m) { return m.reconstruct(lambda, extrapolate); }, model);
}

AffineMap param_domain(const PulseModel& model) {
  if (const auto* poly = std::get_if<PolyPulseModel>(&model)) return poly->param_domain;
  const auto& spectral = std::get<SpectralPulseModel>(model);
  return {spectral.param_min(), spectral.param_max()};
}

const nlohmann::json& model_context(const PulseModel& model) {
  return std::visit([](const auto& m) -> const nlohmann::json& { return m.context; }, model);
}

const std::string& model_parameter_name(const PulseModel& model) {
  return std::visit([](const auto& m) -> const std::string& { return m.parameter_name; }, model);
}

PulseModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("malformed model file " + path.string() + ": " + e.what());
  }
  const std::string kind = j.value("kind", "");
  if (kind == "poly") return PolyPulseModel::from_json(j);
  if (kind == "spectral") return SpectralPulseModel::from_json(j);
  throw ValidationError("model file " + path.string() + " has unknown kind '" + kind + "'");
}

void save_model(const std::filesystem::path& path, const PulseModel& model) {
  std::visit([&](const auto& m) { m.save(path); }, model);
}

}  // namespace cprlab
