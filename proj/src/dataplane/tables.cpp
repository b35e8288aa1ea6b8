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

#include "civic/dataplane/tables.hpp"

#include <algorithm>
#include <string>

#include "civic/error.hpp"

namespace civic::dp {

RangeTable::RangeTable(std::vector<RangeEntry> entries, std::uint32_t default_action)
    : entries_(std::move(entries)), default_action_(default_action) {
  validate();
}

RangeTable RangeTable::from_boundaries(const std::vector<std::uint32_t>& boundaries,
                                       const std::vector<std::uint32_t>& actions,
                                       std::uint32_t default_action) {
  if (actions.size() != boundaries.size() + 1) {
    throw BuildError("range table: need one more action than boundaries");
  }
  std::vector<RangeEntry> entries;
  std::uint64_t lo = 0;
  for (std::size_t i = 0; i < boundaries.size(); ++i) {
    entries.push_back({lo, boundaries[i], actions[i]});
    lo = boundaries[i];
  }
  entries.push_back({lo, kKeySpaceEnd, actions.back()});
  return RangeTable(std::move(entries), default_action);
}

void RangeTable::validate() const {
  if (entries_.empty()) throw BuildError("range table: no entries");
  std::uint64_t expected = 0;
  for (const RangeEntry& e : entries_) {
    if (e.lo != expected) {
      throw BuildError("range table: gap or overlap at key " + std::to_string(e.lo));
    }
    if (e.hi <= e.lo) throw BuildError("range table: empty range at " + std::to_string(e.lo));
    expected = e.hi;
  }
  if (expected != kKeySpaceEnd) throw BuildError("range table: key space not fully covered");
}

std::uint32_t RangeTable::lookup(std::uint32_t key) const {
  const auto it = std::upper_bound(
      entries_.begin(), entries_.end(), std::uint64_t{key},
      [](std::uint64_t k, const RangeEntry& e) { return k < e.lo; });
  if (it == entries_.begin()) return default_action_;
  const RangeEntry& e = *std::prev(it);
  return key < e.hi ? e.action : default_action_;
}

std::vector<std::uint32_t> RangeTable::boundaries() const {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    out.push_back(static_cast<std::uint32_t>(entries_[i].lo));
  }
  return out;
}

std::uint32_t ExactTable::lookup(std::uint64_t key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? default_action_ : it->second;
}

}  // namespace civic::dp
