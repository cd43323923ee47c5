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

#include <filesystem>
#include <variant>

#include "cprlab/poly_model.hpp"
#include "cprlab/spectral_model.hpp"

namespace cprlab {

using PulseModel = std::variant<PolyPulseModel, SpectralPulseModel>;

ControlPulse reconstruct(const PulseModel& model, double lambda, bool extrapolate = false);
AffineMap param_domain(const PulseModel& model);
const nlohmann::json& model_context(const PulseModel& model);
const std::string& model_parameter_name(const PulseModel& model);

/// Reads model_poly.json or model_spectral.json, dispatching on the "kind" field.
PulseModel load_model(const std::filesystem::path& path);
void save_model(const std::filesystem::path& path, const PulseModel& model);

}  // namespace cprlab
