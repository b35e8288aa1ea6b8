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

#include "civic/wire.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "civic/error.hpp"

namespace civic::wire {

namespace {

void check_permille(std::uint16_t v, const char* field, bool decoding) {
  if (v <= kPermilleMax) return;
  const std::string msg = std::string(field) + " = " + std::to_string(v) + " permille exceeds 1000";
  if (decoding) throw ParseError(msg);
  throw EncodeError(msg);
}

}  // namespace

Bytes encode(const ControlMessage& msg) {
  check_permille(msg.pump_permille, "P1", false);
  check_permille(msg.valve1_permille, "V1", false);
  check_permille(msg.valve2_permille, "V2", false);
  Bytes out(kMessageSize);
  std::uint8_t* p = out.data();
  store_le(p + offset::kSeq, msg.seq);
  store_le(p + offset::kTimestamp, msg.timestamp_us);
  for (std::size_t i = 0; i < 4; ++i) store_le(p + offset::kLevel1 + 4 * i, msg.levels_mL[i]);
  store_le(p + offset::kPump, msg.pump_permille);
  store_le(p + offset::kValve1, msg.valve1_permille);
  store_le(p + offset::kValve2, msg.valve2_permille);
  return out;
}

ControlMessage decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMessageSize) {
    throw ParseError("control message needs " + std::to_string(kMessageSize) + " bytes, got " +
                     std::to_string(bytes.size()));
  }
  const std::uint8_t* p = bytes.data();
  ControlMessage msg;
  msg.seq = load_le<std::uint32_t>(p + offset::kSeq);
  msg.timestamp_us = load_le<std::uint64_t>(p + offset::kTimestamp);
  for (std::size_t i = 0; i < 4; ++i) {
    msg.levels_mL[i] = load_le<std::uint32_t>(p + offset::kLevel1 + 4 * i);
  }
  msg.pump_permille = load_le<std::uint16_t>(p + offset::kPump);
  msg.valve1_permille = load_le<std::uint16_t>(p + offset::kValve1);
  msg.valve2_permille = load_le<std::uint16_t>(p + offset::kValve2);
  check_permille(msg.pump_permille, "P1", true);
  check_permille(msg.valve1_permille, "V1", true);
  check_permille(msg.valve2_permille, "V2", true);
  return msg;
}

bool has_label(std::span<const std::uint8_t> bytes) { return bytes.size() >= kLabeledSize; }

Bytes append_label(std::span<const std::uint8_t> bytes, const CivicLabel& label) {
  if (bytes.size() != kMessageSize) {
    throw EncodeError(bytes.size() > kMessageSize ? "message already carries a trailer"
                                                  : "label needs a complete base message");
  }
  Bytes out(bytes.begin(), bytes.end());
  out.resize(kLabeledSize);
  out[offset::kLabelSeverity] = static_cast<std::uint8_t>(label.severity);
  out[offset::kLabelScenario] = label.scenario;
  store_le(out.data() + offset::kLabelKey, label.window_slope_biased);
  return out;
}

CivicLabel decode_label(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kLabeledSize) throw ParseError("message carries no label trailer");
  const auto severity = severity_from_code(bytes[offset::kLabelSeverity]);
  if (!severity) {
    throw ParseError("invalid severity code " + std::to_string(bytes[offset::kLabelSeverity]));
  }
  CivicLabel label;
  label.severity = *severity;
  label.scenario = bytes[offset::kLabelScenario];
  label.window_slope_biased = load_le<std::uint32_t>(bytes.data() + offset::kLabelKey);
  return label;
}

std::pair<Bytes, CivicLabel> strip_label(std::span<const std::uint8_t> bytes) {
  CivicLabel label = decode_label(bytes);
  return {Bytes(bytes.begin(), bytes.begin() + kMessageSize), label};
}

std::uint32_t to_milliliters(double litres) {
  const double ml = std::round(litres * 1000.0);
  if (!(ml > 0.0)) return 0;
  return static_cast<std::uint32_t>(
      std::min(ml, static_cast<double>(std::numeric_limits<std::uint32_t>::max())));
}

std::uint16_t to_permille(double fraction) {
  const double pm = std::round(std::clamp(fraction, 0.0, 1.0) * 1000.0);
  return static_cast<std::uint16_t>(pm);
}

}  // namespace civic::wire
