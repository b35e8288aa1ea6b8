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

#include "civic/dataplane/registers.hpp"

#include "civic/error.hpp"

namespace civic::dp {

RingRegister::RingRegister(std::uint32_t capacity) : data_(capacity, 0) {
  if (capacity == 0) throw BuildError("ring register needs capacity >= 1");
}

EvictedSlot RingRegister::push(std::uint32_t value) {
  const std::uint32_t n = capacity();
  if (index_ >= n) throw ProgramError("ring register index out of range");
  EvictedSlot ev{index_, data_[index_], pushes_ >= n};
  data_[index_] = value;
  // Wrap by comparison; the data plane has no modulo.
  index_ = index_ + 1 == n ? 0 : index_ + 1;
  if (pushes_ < n) ++pushes_;
  return ev;
}

RingWindow RingRegister::window() const {
  const std::uint32_t n = capacity();
  RingWindow w;
  w.filled = pushes_ >= n;
  if (pushes_ == 0) return w;
  w.newest = data_[index_ == 0 ? n - 1 : index_ - 1];
  w.oldest = w.filled ? data_[index_] : data_[0];
  return w;
}

std::vector<std::uint32_t> RingRegister::contents() const {
  const std::uint32_t n = capacity();
  std::vector<std::uint32_t> out;
  if (pushes_ < n) {
    out.assign(data_.begin(), data_.begin() + pushes_);
    return out;
  }
  for (std::uint32_t i = 0; i < n; ++i) out.push_back(data_[(index_ + i) % n]);
  return out;
}

void RegisterFile::add(const std::string& name, std::uint32_t capacity) {
  if (!rings_.emplace(name, RingRegister(capacity)).second) {
    throw BuildError("register '" + name + "' declared twice");
  }
}

RingRegister& RegisterFile::at(const std::string& name) {
  const auto it = rings_.find(name);
  if (it == rings_.end()) throw ProgramError("unknown register '" + name + "'");
  return it->second;
}

const RingRegister& RegisterFile::at(const std::string& name) const {
  const auto it = rings_.find(name);
  if (it == rings_.end()) throw ProgramError("unknown register '" + name + "'");
  return it->second;
}

}  // namespace civic::dp
