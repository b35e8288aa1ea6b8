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
#include "civic/error.hpp"
#include "civic/wire.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace civic;
using namespace civic::wire;

namespace {

ControlMessage random_message(std::mt19937_64& g) {
  std::uniform_int_distribution<std::uint32_t> u32;
  std::uniform_int_distribution<std::uint64_t> u64;
  std::uniform_int_distribution<std::uint16_t> pm(0, kPermilleMax);
  ControlMessage m;
  m.seq = u32(g);
  m.timestamp_us = u64(g);
  for (auto& l : m.levels_mL) l = u32(g);
  m.pump_permille = pm(g);
  m.valve1_permille = pm(g);
  m.valve2_permille = pm(g);
  return m;
}

}  // namespace

TEST_CASE("wire: L3 = 7500 mL encodes little-endian at offset 20") {
  ControlMessage m;
  m.levels_mL[2] = 7500;
  const Bytes b = encode(m);
  REQUIRE(b.size() == kMessageSize);
  CHECK(b[20] == 0x4C);
  CHECK(b[21] == 0x1D);
  CHECK(b[22] == 0x00);
  CHECK(b[23] == 0x00);
}

TEST_CASE("wire: field offsets") {
  ControlMessage m;
  m.seq = 0x01020304;
  m.timestamp_us = 0x1122334455667788ULL;
  m.levels_mL = {0xA1, 0xA2, 0xA3, 0xA4};
  m.pump_permille = 1000;
  m.valve1_permille = 0x0102;
  m.valve2_permille = 0x0304;
  const Bytes b = encode(m);
  CHECK(b[0] == 0x04);
  CHECK(b[3] == 0x01);
  CHECK(b[4] == 0x88);
  CHECK(b[11] == 0x11);
  CHECK(b[12] == 0xA1);
  CHECK(b[16] == 0xA2);
  CHECK(b[24] == 0xA4);
  CHECK(b[28] == 0xE8);
  CHECK(b[29] == 0x03);
  CHECK(b[30] == 0x02);
  CHECK(b[33] == 0x03);
}

TEST_CASE("wire: encode/decode round trip (randomized)") {
  auto g = oracle::rng(99);
  for (int i = 0; i < 10000; ++i) {
    const ControlMessage m = random_message(g);
    const Bytes b = encode(m);
    CHECK(decode(b) == m);
    CHECK(encode(decode(b)) == b);
  }
}

TEST_CASE("wire: boundary and error cases") {
  const Bytes b = encode(ControlMessage{});
  CHECK_THROWS_AS(decode(std::span(b).first(kMessageSize - 1)), ParseError);
  CHECK_THROWS_AS(decode(Bytes{}), ParseError);
  ControlMessage bad;
  bad.valve2_permille = 1001;
  CHECK_THROWS_AS(encode(bad), EncodeError);
  Bytes raw = b;
  raw[offset::kPump] = 0xFF;
  raw[offset::kPump + 1] = 0xFF;
  CHECK_THROWS_AS(decode(raw), ParseError);
}

TEST_CASE("wire: label trailer") {
  ControlMessage m;
  m.seq = 7;
  const Bytes base = encode(m);
  CHECK_FALSE(has_label(base));
  const CivicLabel label{Severity::Warning, 1, 0x80000000U - 400U};
  const Bytes labeled = append_label(base, label);
  REQUIRE(labeled.size() == kLabeledSize);
  CHECK(has_label(labeled));
  CHECK(labeled[offset::kLabelSeverity] == 1);
  CHECK(labeled[offset::kLabelScenario] == 1);
  CHECK(decode_label(labeled) == label);
  CHECK(decode(labeled) == m);
  const auto [stripped, l2] = strip_label(labeled);
  CHECK(stripped == base);
  CHECK(l2 == label);
  CHECK_THROWS_AS(append_label(labeled, label), EncodeError);
  CHECK_THROWS_AS(decode_label(base), ParseError);
  Bytes unknown = labeled;
  unknown[offset::kLabelSeverity] = 7;
  CHECK_THROWS_AS(decode_label(unknown), ParseError);
}

TEST_CASE("wire: unit conversion") {
  CHECK(to_milliliters(7.5) == 7500);
  CHECK(to_milliliters(0.0004) == 0);
  CHECK(to_milliliters(0.0005) == 1);
  CHECK(to_milliliters(-0.2) == 0);
  CHECK(to_permille(0.8) == 800);
  CHECK(to_permille(1.2) == 1000);
  CHECK(to_permille(-1.0) == 0);
}
