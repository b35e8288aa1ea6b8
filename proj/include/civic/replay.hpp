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

#include <chrono>

#include "civic/trace.hpp"
#include "civic/validator.hpp"

namespace civic::replay {

enum class Mode {
  InProcess,  // call the validator directly
  Socket,     // sender -> switch -> capture over loopback UDP
};

std::string_view to_string(Mode m);
Mode parse_mode(std::string_view name);

struct SocketOptions {
  // Fast mode sends back to back; otherwise packets follow the recorded
  // timestamps.
  bool fast = false;
  std::chrono::milliseconds receive_timeout{2000};
};

/// Labels every record with a fresh validator built from `spec`.
trace::Trace replay(const trace::Trace& trace, const validator::ValidatorSpec& spec, Mode mode,
                    const SocketOptions& options = {});

/// In-process replay through an existing validator (registers persist).
trace::Trace replay_through(const trace::Trace& trace, validator::Validator& v);

}  // namespace civic::replay
