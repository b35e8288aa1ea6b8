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

#include "civic/metrics.hpp"

#include <iomanip>
#include <sstream>

#include "civic/error.hpp"

namespace civic::metrics {

namespace {

double ratio(std::size_t num, std::size_t den, bool& undefined) {
  undefined = den == 0;
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

void finalize(ConfusionReport& r) {
  r.decision_points = 0;
  for (const auto& row : r.counts) {
    for (std::size_t c : row) r.decision_points += c;
  }
  for (std::size_t k = 0; k < 3; ++k) {
    std::size_t tp = r.counts[k][k];
    std::size_t predicted = 0;
    std::size_t actual = 0;
    for (std::size_t j = 0; j < 3; ++j) {
      predicted += r.counts[j][k];
      actual += r.counts[k][j];
    }
    const std::size_t fp = predicted - tp;
    const std::size_t fn = actual - tp;
    const std::size_t tn = r.decision_points - tp - fp - fn;
    ClassScores& s = r.scores[k];
    s.support = actual;
    s.precision = ratio(tp, predicted, s.precision_undefined);
    s.recall = ratio(tp, actual, s.recall_undefined);
    s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
                                        : 0.0;
    bool unused = false;
    s.accuracy = ratio(tp + tn, r.decision_points, unused);
  }
}

}  // namespace

std::size_t ConfusionReport::downward_errors() const {
  std::size_t n = 0;
  for (std::size_t t = 0; t < 3; ++t) {
    for (std::size_t p = 0; p < t; ++p) n += counts[t][p];
  }
  return n;
}

std::size_t ConfusionReport::upward_errors() const {
  std::size_t n = 0;
  for (std::size_t t = 0; t < 3; ++t) {
    for (std::size_t p = t + 1; p < 3; ++p) n += counts[t][p];
  }
  return n;
}

ConfusionReport score_pairs(const std::vector<LabelPair>& pairs) {
  ConfusionReport r;
  for (const auto& [truth, predicted] : pairs) {
    if (!is_decision(truth)) throw Error("score: ground truth must be a decision class");
    if (is_decision(predicted)) {
      ++r.counts[class_index(truth)][class_index(predicted)];
    } else {
      ++r.no_decision[class_index(truth)];
    }
  }
  finalize(r);
  return r;
}

ConfusionReport score(const std::vector<trace::Trace>& labeled) {
  std::vector<LabelPair> pairs;
  for (const trace::Trace& t : labeled) {
    for (const trace::TraceRecord& rec : t.records) {
      if (!rec.label) throw Error("score: run '" + t.header.run_id + "' has unlabelled records");
      pairs.emplace_back(rec.truth, rec.label->severity);
    }
  }
  return score_pairs(pairs);
}

ConfusionReport score_runs_majority(const std::vector<trace::Trace>& labeled) {
  std::vector<LabelPair> pairs;
  for (const trace::Trace& t : labeled) {
    std::array<std::size_t, 3> votes{};
    for (const trace::TraceRecord& rec : t.records) {
      if (!rec.label) throw Error("score: run '" + t.header.run_id + "' has unlabelled records");
      if (is_decision(rec.label->severity)) ++votes[class_index(rec.label->severity)];
    }
    Severity winner = Severity::NoDecision;
    std::size_t best = 0;
    for (Severity s : kSeverityClasses) {
      if (votes[class_index(s)] > 0 && votes[class_index(s)] >= best) {
        best = votes[class_index(s)];
        winner = s;
      }
    }
    pairs.emplace_back(t.header.severity, winner);
  }
  return score_pairs(pairs);
}

std::string ConfusionReport::to_text(const std::string& title) const {
  std::ostringstream out;
  out << title << '\n';
  if (empty()) {
    out << "  (empty: no decision points)\n";
    return out.str();
  }
  // Numeric columns are 10 wide plus one flag column for 0/0 ratios.
  out << std::left << std::setw(10) << "class" << std::right;
  for (const char* h : {"precision", "recall", "f1", "accuracy"}) out << std::setw(10) << h << ' ';
  out << std::setw(10) << "support" << '\n';
  out << std::fixed << std::setprecision(4);
  for (Severity s : kSeverityClasses) {
    const ClassScores& c = scores[class_index(s)];
    out << std::left << std::setw(10) << to_string(s) << std::right << std::setw(10) << c.precision
        << (c.precision_undefined ? '*' : ' ') << std::setw(10) << c.recall
        << (c.recall_undefined ? '*' : ' ') << std::setw(10) << c.f1 << ' ' << std::setw(10)
        << c.accuracy << ' ' << std::setw(10) << c.support << '\n';
  }
  out << "confusion (rows truth, columns predicted)\n";
  out << std::left << std::setw(10) << "" << std::right;
  for (const char* h : {"normal", "warning", "error", "no_decision"}) out << std::setw(12) << h;
  out << '\n';
  for (Severity t : kSeverityClasses) {
    out << std::left << std::setw(10) << to_string(t) << std::right;
    for (Severity p : kSeverityClasses) out << std::setw(12) << counts[class_index(t)][class_index(p)];
    out << std::setw(12) << no_decision[class_index(t)] << '\n';
  }
  out << "decision points " << decision_points << ", upward errors " << upward_errors()
      << ", downward errors " << downward_errors() << '\n';
  if (scores[0].precision_undefined || scores[1].precision_undefined ||
      scores[2].precision_undefined || scores[0].recall_undefined ||
      scores[1].recall_undefined || scores[2].recall_undefined) {
    out << "* 0/0 reported as 0\n";
  }
  return out.str();
}

nlohmann::json ConfusionReport::to_json() const {
  nlohmann::json j;
  j["empty"] = empty();
  j["decision_points"] = decision_points;
  j["counts"] = counts;
  j["no_decision"] = no_decision;
  j["upward_errors"] = upward_errors();
  j["downward_errors"] = downward_errors();
  for (Severity s : kSeverityClasses) {
    const ClassScores& c = scores[class_index(s)];
    j["classes"][std::string(to_string(s))] = {
        {"precision", c.precision}, {"recall", c.recall},
        {"f1", c.f1},               {"accuracy", c.accuracy},
        {"support", c.support},     {"precision_undefined", c.precision_undefined},
        {"recall_undefined", c.recall_undefined}};
  }
  return j;
}

}  // namespace civic::metrics
