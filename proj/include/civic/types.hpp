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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace civic {

/// Validity class assigned to a decision window. The numeric values are the
/// on-wire encoding of the label trailer's severity byte.
enum class Severity : std::uint8_t {
  Normal = 0,
  Warning = 1,
  Error = 2,
  NoDecision = 255,
};

inline constexpr std::array<Severity, 3> kSeverityClasses = {
    Severity::Normal, Severity::Warning, Severity::Error};

/// Index 0..2 for the three decision classes.
inline constexpr std::size_t class_index(Severity s) {
  return static_cast<std::size_t>(s);
}

inline constexpr bool is_decision(Severity s) {
  return s != Severity::NoDecision;
}

std::string_view to_string(Severity s);
std::optional<Severity> severity_from_code(std::uint8_t code);
Severity parse_severity(std::string_view name);

enum class Scenario : std::uint8_t {
  CloggedPipe = 1,
  FailingPump = 2,
};

std::string_view to_string(Scenario s);
Scenario parse_scenario(std::string_view name);

}  // namespace civic
