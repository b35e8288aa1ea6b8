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

#include "civic/types.hpp"

#include "civic/error.hpp"

namespace civic {

std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::Normal: return "normal";
    case Severity::Warning: return "warning";
    case Severity::Error: return "error";
    case Severity::NoDecision: return "no_decision";
  }
  return "invalid";
}

std::optional<Severity> severity_from_code(std::uint8_t code) {
  switch (code) {
    case 0: return Severity::Normal;
    case 1: return Severity::Warning;
    case 2: return Severity::Error;
    case 255: return Severity::NoDecision;
    default: return std::nullopt;
  }
}

Severity parse_severity(std::string_view name) {
  if (name == "normal") return Severity::Normal;
  if (name == "warning") return Severity::Warning;
  if (name == "error") return Severity::Error;
  if (name == "no_decision") return Severity::NoDecision;
  throw ConfigError("unknown severity '" + std::string(name) + "'");
}

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::CloggedPipe: return "clogged_pipe";
    case Scenario::FailingPump: return "failing_pump";
  }
  return "invalid";
}

Scenario parse_scenario(std::string_view name) {
  if (name == "clogged_pipe") return Scenario::CloggedPipe;
  if (name == "failing_pump") return Scenario::FailingPump;
  throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

}  // namespace civic
