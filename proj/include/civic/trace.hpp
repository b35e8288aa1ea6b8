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

// Trace file format, version 1. Plain text, one record per line:
//
//   CIVICTRACE 1
//   run <id>
//   scenario <clogged_pipe|failing_pump>
//   severity <normal|warning|error>
//   config_hash <16 hex digits>
//   seed <u64>
//   records <count>
//   seq,timestamp_us,L1,L2,L3,L4,P1,V1,V2,truth,label_severity,label_scenario,label_key
//   <count data lines>
//
// The three label columns are "-" for records that were not replayed.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "civic/types.hpp"
#include "civic/wire.hpp"

namespace civic::trace {

inline constexpr int kFormatVersion = 1;
inline constexpr std::string_view kMagic = "CIVICTRACE";

struct TraceRecord {
  wire::ControlMessage message;
  Severity truth = Severity::Normal;
  std::optional<wire::CivicLabel> label;

  bool operator==(const TraceRecord&) const = default;
};

struct TraceHeader {
  std::string run_id = "run";
  Scenario scenario = Scenario::CloggedPipe;
  Severity severity = Severity::Normal;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;

  bool operator==(const TraceHeader&) const = default;
};

struct Trace {
  TraceHeader header;
  std::vector<TraceRecord> records;

  bool operator==(const Trace&) const = default;
};

void write_trace(std::ostream& out, const Trace& trace);
Trace read_trace(std::istream& in);

void write_trace(const std::filesystem::path& path, const Trace& trace);
Trace read_trace(const std::filesystem::path& path);

std::string to_text(const Trace& trace);

/// 64-bit FNV-1a, used for config fingerprints in trace headers.
std::uint64_t fnv1a64(std::string_view data);

}  // namespace civic::trace
