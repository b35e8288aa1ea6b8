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

// Control message wire format (little-endian, no padding):
//
//   offset  size  field
//        0     4  seq            u32
//        4     8  timestamp_us   u64
//       12     4  L1             u32 mL
//       16     4  L2             u32 mL
//       20     4  L3             u32 mL
//       24     4  L4             u32 mL
//       28     2  P1             u16 permille
//       30     2  V1             u16 permille
//       32     2  V2             u16 permille
//
// A labelled message carries a 6-byte trailer directly after the base:
//
//       34     1  severity       u8 (0 normal, 1 warning, 2 error, 255 none)
//       35     1  scenario       u8
//       36     4  slope key      u32 (biased window slope, 0 if no decision)

#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <utility>
#include <vector>

#include "civic/types.hpp"

namespace civic::wire {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::size_t kMessageSize = 34;
inline constexpr std::size_t kLabelSize = 6;
inline constexpr std::size_t kLabeledSize = kMessageSize + kLabelSize;
inline constexpr std::uint16_t kPermilleMax = 1000;

namespace offset {
inline constexpr std::size_t kSeq = 0;
inline constexpr std::size_t kTimestamp = 4;
inline constexpr std::size_t kLevel1 = 12;
inline constexpr std::size_t kLevel2 = 16;
inline constexpr std::size_t kLevel3 = 20;
inline constexpr std::size_t kLevel4 = 24;
inline constexpr std::size_t kPump = 28;
inline constexpr std::size_t kValve1 = 30;
inline constexpr std::size_t kValve2 = 32;
inline constexpr std::size_t kLabelSeverity = 34;
inline constexpr std::size_t kLabelScenario = 35;
inline constexpr std::size_t kLabelKey = 36;
}  // namespace offset

struct ControlMessage {
  std::uint32_t seq = 0;
  std::uint64_t timestamp_us = 0;
  std::array<std::uint32_t, 4> levels_mL{};
  std::uint16_t pump_permille = 0;
  std::uint16_t valve1_permille = 0;
  std::uint16_t valve2_permille = 0;

  bool operator==(const ControlMessage&) const = default;
};

struct CivicLabel {
  Severity severity = Severity::NoDecision;
  std::uint8_t scenario = 0;
  std::uint32_t window_slope_biased = 0;

  bool operator==(const CivicLabel&) const = default;
};

template <typename T>
void store_le(std::uint8_t* out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out[i] = static_cast<std::uint8_t>(static_cast<std::uint64_t>(value) >> (8 * i));
  }
}

template <typename T>
T load_le(const std::uint8_t* in) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(in[i]) << (8 * i);
  return static_cast<T>(v);
}

/// Throws EncodeError when a permille field exceeds 1000.
Bytes encode(const ControlMessage& msg);

/// Reads the base message; trailing bytes are ignored. Throws ParseError on
/// a short buffer or a permille field above 1000.
ControlMessage decode(std::span<const std::uint8_t> bytes);

bool has_label(std::span<const std::uint8_t> bytes);

/// Appends the trailer to an unlabelled message. Throws EncodeError if the
/// buffer is not exactly one base message.
Bytes append_label(std::span<const std::uint8_t> bytes, const CivicLabel& label);

CivicLabel decode_label(std::span<const std::uint8_t> bytes);

/// Splits a labelled message back into base bytes and label.
std::pair<Bytes, CivicLabel> strip_label(std::span<const std::uint8_t> bytes);

std::uint32_t to_milliliters(double litres);
std::uint16_t to_permille(double fraction);

}  // namespace civic::wire
