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
#include <limits>
#include <unordered_map>
#include <vector>

namespace civic::dp {

inline constexpr std::uint64_t kKeySpaceEnd = std::uint64_t{1} << 32;

/// One half-open key range [lo, hi) over the 32-bit key space.
struct RangeEntry {
  std::uint64_t lo = 0;
  std::uint64_t hi = kKeySpaceEnd;
  std::uint32_t action = 0;

  bool operator==(const RangeEntry&) const = default;
};

/// Range-match table. Entries are sorted, disjoint and cover [0, 2^32).
class RangeTable {
 public:
  RangeTable() = default;
  RangeTable(std::vector<RangeEntry> entries, std::uint32_t default_action);

  /// Ranges split at ascending `boundaries`; actions.size() must be
  /// boundaries.size() + 1.
  static RangeTable from_boundaries(const std::vector<std::uint32_t>& boundaries,
                                    const std::vector<std::uint32_t>& actions,
                                    std::uint32_t default_action = 0);

  std::uint32_t lookup(std::uint32_t key) const;

  const std::vector<RangeEntry>& entries() const { return entries_; }
  std::uint32_t default_action() const { return default_action_; }
  std::vector<std::uint32_t> boundaries() const;

  bool operator==(const RangeTable&) const = default;

 private:
  void validate() const;

  std::vector<RangeEntry> entries_{RangeEntry{}};
  std::uint32_t default_action_ = 0;
};

class ExactTable {
 public:
  ExactTable() = default;
  explicit ExactTable(std::uint32_t default_action) : default_action_(default_action) {}

  void insert(std::uint64_t key, std::uint32_t action) { entries_[key] = action; }
  std::uint32_t lookup(std::uint64_t key) const;

  const std::unordered_map<std::uint64_t, std::uint32_t>& entries() const { return entries_; }
  std::uint32_t default_action() const { return default_action_; }

 private:
  std::unordered_map<std::uint64_t, std::uint32_t> entries_;
  std::uint32_t default_action_ = 0;
};

}  // namespace civic::dp
