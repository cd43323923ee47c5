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
#include <string>

#include <json.hpp>

#include "cprlab/grape.hpp"

namespace cprlab {

// Family archive: <dir>/family.json plus one pulse CSV per member named
// pulse_<param>_<value>.csv. `context` is free-form metadata (basis, fixed
// physical parameters) carried along so later stages can rebuild targets.
std::string pulse_filename(const std::string& parameter_name, double value);

nlohmann::json settings_to_json(const GrapeSettings& s);
GrapeSettings settings_from_json(const nlohmann::json& j);

void save_family(const std::filesystem::path& dir, const PulseFamily& family,
                 const nlohmann::json& context = nlohmann::json::object());

struct LoadedFamily {
  PulseFamily family;
  nlohmann::json context;
};

LoadedFamily load_family(const std::filesystem::path& dir);

}  // namespace cprlab
