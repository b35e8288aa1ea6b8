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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace civic::dp {

struct EvictedSlot {
  std::uint32_t slot = 0;
  std::uint32_t value = 0;
  bool occupied = false;  // false while the ring is still filling
};

struct RingWindow {
  std::uint32_t oldest = 0;
  std::uint32_t newest = 0;
  bool filled = false;
};

/// Ring buffer held in two data-plane registers: an index register pointing
/// at the next slot to write and a data register array of `capacity` words.
/// A saturating push counter tracks whether the window has filled.
class RingRegister {
 public:
  explicit RingRegister(std::uint32_t capacity);

  EvictedSlot push(std::uint32_t value);
  RingWindow window() const;

  std::uint32_t index() const { return index_; }
  std::uint32_t capacity() const { return static_cast<std::uint32_t>(data_.size()); }
  std::uint32_t pushes() const { return pushes_; }
  const std::vector<std::uint32_t>& data() const { return data_; }

  /// Values in insertion order, oldest first.
  std::vector<std::uint32_t> contents() const;

 private:
  std::uint32_t index_ = 0;
  std::uint32_t pushes_ = 0;
  std::vector<std::uint32_t> data_;
};

/// Register state owned by one pipeline instance.
class RegisterFile {
 public:
  void add(const std::string& name, std::uint32_t capacity);
  RingRegister& at(const std::string& name);
  const RingRegister& at(const std::string& name) const;
  bool contains(const std::string& name) const { return rings_.count(name) != 0; }

 private:
  std::map<std::string, RingRegister> rings_;
};

}  // namespace civic::dp
