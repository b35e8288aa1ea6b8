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

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "civic/trace.hpp"
#include "civic/types.hpp"

namespace civic::metrics {

/// One-vs-rest scores of one class. A 0/0 ratio is reported as 0 and
/// flagged as undefined.
struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  std::size_t support = 0;
  bool precision_undefined = false;
  bool recall_undefined = false;
};

struct ConfusionReport {
  // [truth][predicted] over decision points.
  std::array<std::array<std::size_t, 3>, 3> counts{};
  // Packets without a decision, per truth class.
  std::array<std::size_t, 3> no_decision{};
  std::size_t decision_points = 0;
  std::array<ClassScores, 3> scores{};

  bool empty() const { return decision_points == 0; }
  const ClassScores& operator[](Severity s) const { return scores[class_index(s)]; }

  /// Misclassified decisions whose predicted class is less severe than the
  /// truth.
  std::size_t downward_errors() const;
  std::size_t upward_errors() const;

  std::string to_text(const std::string& title) const;
  nlohmann::json to_json() const;
};

using LabelPair = std::pair<Severity, Severity>;  // {truth, predicted}

ConfusionReport score_pairs(const std::vector<LabelPair>& pairs);

/// Window-level scoring of replayed traces. Throws Error if a record carries
/// no label.
ConfusionReport score(const std::vector<trace::Trace>& labeled);

/// One decision per run: the most frequent predicted class among its
/// decision points, ties broken towards the more severe class.
ConfusionReport score_runs_majority(const std::vector<trace::Trace>& labeled);

}  // namespace civic::metrics
