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

#include <json.hpp>

#include "cprlab/transmon.hpp"

namespace cprlab {

// CSV layout:
//   # tau_ns=<duration>, n_steps=<N>
//   index,eps_I,eps_Q
// with every double printed to 17 significant digits so reading a file back
// reproduces the pulse bit for bit.
void write_pulse_csv(const std::filesystem::path& path, const ControlPulse& pulse);
ControlPulse read_pulse_csv(const std::filesystem::path& path);

nlohmann::json pulse_to_json(const ControlPulse& pulse);
ControlPulse pulse_from_json(const nlohmann::json& j);

nlohmann::json device_to_json(const DeviceConfig& cfg);
DeviceConfig device_from_json(const nlohmann::json& j);

}  // namespace cprlab
