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

// Randomized equivalence suites shared by the unit tests and the acceptance
// binary. Each returns the number of cases run and the number that failed.

#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "civic/dataplane/registers.hpp"
#include "civic/dataplane/tables.hpp"
#include "civic/metrics.hpp"
#include "civic/validator.hpp"
#include "oracles.hpp"

namespace suites {

struct Outcome {
  std::size_t cases = 0;
  std::size_t failures = 0;
};

/// Ring register against a bounded queue: window endpoints, fill flag and
/// contents after a random number of pushes.
inline Outcome ring_vs_queue(std::size_t cases, std::uint64_t seed) {
  auto g = oracle::rng(seed);
  std::uniform_int_distribution<std::uint32_t> cap(1, 100), val;
  Outcome out;
  for (std::size_t c = 0; c < cases; ++c) {
    const std::uint32_t n = cap(g);
    std::uniform_int_distribution<int> pushes(0, 3 * static_cast<int>(n) + 5);
    civic::dp::RingRegister ring(n);
    oracle::QueueWindow q(n);
    const int k = pushes(g);
    bool ok = true;
    for (int i = 0; i < k; ++i) {
      const std::uint32_t v = val(g);
      const bool full_before = q.full();
      const std::uint32_t evicted_expect = full_before ? q.oldest() : 0;
      const civic::dp::EvictedSlot ev = ring.push(v);
      q.push(v);
      ok &= ev.occupied == full_before;
      if (full_before) ok &= ev.value == evicted_expect;
      const civic::dp::RingWindow w = ring.window();
      ok &= w.filled == q.full();
      ok &= w.newest == q.newest();
      if (w.filled) ok &= w.oldest == q.oldest();
      ok &= ring.index() < n;
    }
    const auto contents = ring.contents();
    ok &= std::vector<std::uint32_t>(q.items().begin(), q.items().end()) == contents;
    ++out.cases;
    out.failures += ok ? 0 : 1;
  }
  return out;
}

/// Range table lookup against a linear scan, on random contiguous tables
/// and keys biased towards the boundaries.
inline Outcome range_vs_scan(std::size_t cases, std::uint64_t seed) {
  auto g = oracle::rng(seed);
  std::uniform_int_distribution<int> count(0, 12);
  std::uniform_int_distribution<std::uint32_t> u32, action(0, 7), coin(0, 3);
  std::uniform_int_distribution<int> delta(-2, 2);
  Outcome out;
  for (std::size_t c = 0; c < cases; ++c) {
    std::set<std::uint32_t> bset;
    const int k = count(g);
    while (static_cast<int>(bset.size()) < k) {
      const std::uint32_t b = u32(g);
      if (b != 0) bset.insert(b);
    }
    const std::vector<std::uint32_t> bounds(bset.begin(), bset.end());
    std::vector<std::uint32_t> actions(bounds.size() + 1);
    for (auto& a : actions) a = action(g);
    const civic::dp::RangeTable table = civic::dp::RangeTable::from_boundaries(bounds, actions);
    bool ok = table.boundaries() == bounds;
    for (int probe = 0; probe < 16; ++probe) {
      std::uint32_t key = u32(g);
      if (!bounds.empty() && coin(g) != 0) {
        key = bounds[std::uniform_int_distribution<std::size_t>(0, bounds.size() - 1)(g)] +
              static_cast<std::uint32_t>(delta(g));
      }
      if (probe == 0) key = 0;
      if (probe == 1) key = 0xFFFFFFFFU;
      ok &= table.lookup(key) == oracle::linear_scan(table.entries(), table.default_action(), key);
      // Independent of the table's own entries: count boundaries <= key.
      std::size_t idx = 0;
      while (idx < bounds.size() && bounds[idx] <= key) ++idx;
      ok &= table.lookup(key) == actions[idx];
    }
    ++out.cases;
    out.failures += ok ? 0 : 1;
  }
  return out;
}

/// score_pairs against the per-class tally oracle on random label vectors,
/// including NoDecision predictions and empty classes.
inline Outcome metrics_vs_oracle(std::size_t cases, std::uint64_t seed) {
  auto g = oracle::rng(seed);
  std::uniform_int_distribution<int> len(0, 300), cls(0, 2), pred(0, 3), skew(0, 4);
  Outcome out;
  for (std::size_t c = 0; c < cases; ++c) {
    std::vector<civic::metrics::LabelPair> pairs;
    const int n = len(g);
    const int missing = skew(g);  // sometimes never predict one class
    for (int i = 0; i < n; ++i) {
      const auto t = static_cast<civic::Severity>(cls(g));
      int p = pred(g);
      if (p == missing) p = cls(g);
      const civic::Severity ps = p == 3 ? civic::Severity::NoDecision : static_cast<civic::Severity>(p);
      pairs.emplace_back(t, ps);
    }
    const civic::metrics::ConfusionReport r = civic::metrics::score_pairs(pairs);
    const auto o = oracle::one_vs_rest(pairs);
    bool ok = true;
    std::size_t decided = 0;
    std::array<std::array<std::size_t, 3>, 3> counts{};
    std::array<std::size_t, 3> none{};
    for (const auto& [t, p] : pairs) {
      if (civic::is_decision(p)) {
        ++decided;
        ++counts[civic::class_index(t)][civic::class_index(p)];
      } else {
        ++none[civic::class_index(t)];
      }
    }
    ok &= r.decision_points == decided && r.counts == counts && r.no_decision == none;
    for (std::size_t k = 0; k < 3; ++k) {
      ok &= r.scores[k].precision == o[k].precision;
      ok &= r.scores[k].recall == o[k].recall;
      ok &= r.scores[k].f1 == o[k].f1;
      ok &= r.scores[k].accuracy == o[k].accuracy;
      ok &= r.scores[k].support == o[k].support;
    }
    ++out.cases;
    out.failures += ok ? 0 : 1;
  }
  return out;
}

/// Noiseless integer ramps: the biased endpoint key decodes to a slope equal
/// to (n - 1) times the least-squares slope, compared as exact fractions.
inline Outcome slope_fidelity(std::size_t cases, std::uint64_t seed) {
  auto g = oracle::rng(seed);
  std::uniform_int_distribution<int> window(2, 120), step(-60, 60);
  std::uniform_int_distribution<std::uint32_t> start(0, 4000000);
  Outcome out;
  for (std::size_t c = 0; c < cases; ++c) {
    const int n = window(g);
    const std::int64_t s = step(g);
    std::int64_t y0 = start(g);
    if (s < 0) y0 += -s * n;  // keep the ramp non-negative
    std::vector<std::int64_t> ys;
    for (int i = 0; i < n; ++i) ys.push_back(y0 + s * i);
    const auto lsq = oracle::least_squares_slope(ys);
    const std::uint32_t key =
        civic::validator::slope_key(static_cast<std::uint32_t>(ys.front()), static_cast<std::uint32_t>(ys.back()));
    const std::int64_t endpoint = civic::validator::slope_from_key(key);
    const bool ok = endpoint * lsq.den == (n - 1) * lsq.num;
    ++out.cases;
    out.failures += ok ? 0 : 1;
  }
  return out;
}

}  // namespace suites
