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

#include "civic/validator.hpp"

namespace civic::validator {

ReferenceValidator::ReferenceValidator(ValidatorSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
}

wire::CivicLabel ReferenceValidator::decide(const wire::ControlMessage& msg) {
  window_.push_back(static_cast<std::uint32_t>(field_value(msg, spec_.monitored_field)));
  if (window_.size() > spec_.window) window_.pop_front();
  ++seen_;

  wire::CivicLabel label;
  label.scenario = static_cast<std::uint8_t>(spec_.scenario);

  const bool filled = window_.size() == spec_.window;
  const bool boundary = spec_.mode == WindowMode::Sliding || seen_ % spec_.window == 0;
  if (!filled || !boundary || !gate_holds(spec_.gate, msg)) return label;

  const std::int64_t slope = static_cast<std::int64_t>(window_.back()) - window_.front();
  const auto key = static_cast<std::uint32_t>(slope + std::int64_t{kSlopeBias});
  label.severity = classify(key, spec_.table);
  label.window_slope_biased = key;
  return label;
}

std::optional<wire::Bytes> ReferenceValidator::on_packet(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != wire::kMessageSize) return std::nullopt;
  const wire::ControlMessage msg = wire::decode(bytes);
  return wire::append_label(bytes, decide(msg));
}

}  // namespace civic::validator
