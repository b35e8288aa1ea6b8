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

#include "civic/trace.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "civic/error.hpp"

namespace civic::trace {

namespace {

constexpr std::string_view kColumns =
    "seq,timestamp_us,L1,L2,L3,L4,P1,V1,V2,truth,label_severity,label_scenario,label_key";

std::string expect_line(std::istream& in, std::string_view what) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("trace truncated: missing " + std::string(what));
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::string header_value(std::istream& in, std::string_view key) {
  const std::string line = expect_line(in, key);
  const std::string prefix = std::string(key) + " ";
  if (line.rfind(prefix, 0) != 0) {
    throw FormatError("trace header: expected '" + std::string(key) + "', got '" + line + "'");
  }
  return line.substr(prefix.size());
}

template <typename T>
T parse_number(std::string_view text, std::string_view what, int base = 10) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value, base);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw FormatError("trace: bad " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_trace(std::ostream& out, const Trace& trace) {
  const TraceHeader& h = trace.header;
  out << kMagic << ' ' << kFormatVersion << '\n';
  out << "run " << h.run_id << '\n';
  out << "scenario " << to_string(h.scenario) << '\n';
  out << "severity " << to_string(h.severity) << '\n';
  out << "config_hash " << std::hex << std::setw(16) << std::setfill('0') << h.config_hash
      << std::dec << std::setfill(' ') << '\n';
  out << "seed " << h.seed << '\n';
  out << "records " << trace.records.size() << '\n';
  out << kColumns << '\n';
  for (const TraceRecord& r : trace.records) {
    const wire::ControlMessage& m = r.message;
    out << m.seq << ',' << m.timestamp_us;
    for (auto l : m.levels_mL) out << ',' << l;
    out << ',' << m.pump_permille << ',' << m.valve1_permille << ',' << m.valve2_permille << ','
        << static_cast<int>(r.truth);
    if (r.label) {
      out << ',' << static_cast<int>(r.label->severity) << ','
          << static_cast<int>(r.label->scenario) << ',' << r.label->window_slope_biased;
    } else {
      out << ",-,-,-";
    }
    out << '\n';
  }
}

Trace read_trace(std::istream& in) {
  Trace trace;
  const std::string first = expect_line(in, "magic");
  const std::string magic_prefix = std::string(kMagic) + " ";
  if (first.rfind(magic_prefix, 0) != 0) throw FormatError("not a trace file (bad magic)");
  const int version = parse_number<int>(std::string_view(first).substr(magic_prefix.size()),
                                        "version");
  if (version != kFormatVersion) {
    throw FormatError("unsupported trace version " + std::to_string(version));
  }
  TraceHeader& h = trace.header;
  h.run_id = header_value(in, "run");
  try {
    h.scenario = parse_scenario(header_value(in, "scenario"));
    h.severity = parse_severity(header_value(in, "severity"));
  } catch (const ConfigError& e) {
    throw FormatError(std::string("trace header: ") + e.what());
  }
  h.config_hash = parse_number<std::uint64_t>(header_value(in, "config_hash"), "config hash", 16);
  h.seed = parse_number<std::uint64_t>(header_value(in, "seed"), "seed");
  const auto count = parse_number<std::size_t>(header_value(in, "records"), "record count");
  if (expect_line(in, "column header") != kColumns) throw FormatError("trace: bad column header");

  trace.records.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::string line = expect_line(in, "record " + std::to_string(i));
    const auto cols = split_commas(line);
    if (cols.size() != 13) {
      throw FormatError("trace record " + std::to_string(i) + ": expected 13 columns");
    }
    TraceRecord r;
    wire::ControlMessage& m = r.message;
    m.seq = parse_number<std::uint32_t>(cols[0], "seq");
    m.timestamp_us = parse_number<std::uint64_t>(cols[1], "timestamp");
    for (std::size_t k = 0; k < 4; ++k) m.levels_mL[k] = parse_number<std::uint32_t>(cols[2 + k], "level");
    m.pump_permille = parse_number<std::uint16_t>(cols[6], "P1");
    m.valve1_permille = parse_number<std::uint16_t>(cols[7], "V1");
    m.valve2_permille = parse_number<std::uint16_t>(cols[8], "V2");
    const auto truth = severity_from_code(parse_number<std::uint8_t>(cols[9], "truth"));
    if (!truth || !is_decision(*truth)) throw FormatError("trace: invalid ground truth");
    r.truth = *truth;
    if (r.truth != h.severity) throw FormatError("trace: ground truth varies within a run");
    if (cols[10] != "-") {
      const auto sev = severity_from_code(parse_number<std::uint8_t>(cols[10], "label severity"));
      if (!sev) throw FormatError("trace: invalid label severity");
      r.label = wire::CivicLabel{*sev, parse_number<std::uint8_t>(cols[11], "label scenario"),
                                 parse_number<std::uint32_t>(cols[12], "label key")};
    }
    trace.records.push_back(r);
  }
  return trace;
}

void write_trace(const std::filesystem::path& path, const Trace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  write_trace(out, trace);
  if (!out) throw FormatError("failed writing " + path.string());
}

Trace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_trace(in);
}

std::string to_text(const Trace& trace) {
  std::ostringstream out;
  write_trace(out, trace);
  return out.str();
}

}  // namespace civic::trace
