/* Copyright 2026 The civic Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

// JSON forms of the configuration types. Readers start from the defaults
// and override only the keys present, so partial files are valid. Unknown
// keys are rejected with ConfigError.

#include <filesystem>

#include <nlohmann/json.hpp>

#include "civic/controller.hpp"
#include "civic/plant.hpp"
#include "civic/validator.hpp"

namespace civic::config {

using nlohmann::json;

json to_json(const plant::PlantConfig& c);
plant::PlantConfig plant_config_from_json(const json& j);

json to_json(const control::ControllerConfig& c);
control::ControllerConfig controller_config_from_json(const json& j);

json to_json(const validator::ValidatorSpec& s);
validator::ValidatorSpec validator_spec_from_json(const json& j);

validator::ValidatorSpec load_validator_spec(const std::filesystem::path& path);
void save_validator_spec(const std::filesystem::path& path, const validator::ValidatorSpec& s);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

}  // namespace civic::config
