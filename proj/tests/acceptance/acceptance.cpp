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
// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "civic/dataplane/audit.hpp"
#include "civic/error.hpp"
#include "civic/experiment.hpp"
#include "suites.hpp"

using namespace civic;
using experiment::ExperimentPlan;
using experiment::ReportBundle;

namespace {

struct Line {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Line()>& check) {
  Line l;
  try {
    l = check();
  } catch (const std::exception& e) {
    l = {false, std::string("exception: ") + e.what()};
  }
  if (!l.pass) ++failures;
  std::cout << "criterion " << id << ' ' << (l.pass ? "PASS" : "FAIL") << "  " << name << ": " << l.detail
            << std::endl;
}

ExperimentPlan pinned(Scenario sc, bool shifted, replay::Mode mode) {
  ExperimentPlan p = experiment::default_plan(sc, shifted);
  p.validator.mode = validator::WindowMode::Tumbling;
  p.mode = mode;
  p.fast = true;
  return p;
}

bool all_ones(const metrics::ConfusionReport& r) {
  if (r.empty()) return false;
  for (const auto& s : r.scores) {
    if (s.precision != 1.0 || s.recall != 1.0 || s.f1 != 1.0 || s.accuracy != 1.0) return false;
  }
  return true;
}

std::string confusion(const metrics::ConfusionReport& r) {
  std::ostringstream o;
  o << "[";
  for (int t = 0; t < 3; ++t) {
    o << (t ? "; " : "");
    for (int p = 0; p < 3; ++p) o << (p ? " " : "") << r.counts[t][p];
  }
  o << "]";
  return o.str();
}

bool independent_gate(const validator::ValidatorSpec& spec, const wire::ControlMessage& m) {
  const auto field = [&](const std::string& f) -> std::int64_t {
    if (f == "L1") return m.levels_mL[0];
    if (f == "L2") return m.levels_mL[1];
    if (f == "L3") return m.levels_mL[2];
    if (f == "L4") return m.levels_mL[3];
    if (f == "P1") return m.pump_permille;
    if (f == "V1") return m.valve1_permille;
    if (f == "V2") return m.valve2_permille;
    throw Error("unexpected gate field " + f);
  };
  for (const auto& p : spec.gate.predicates) {
    const std::int64_t v = field(p.field), c = p.constant;
    bool ok = false;
    switch (p.cmp) {
      case dp::Comparator::Lt: ok = v < c; break;
      case dp::Comparator::Gt: ok = v > c; break;
      case dp::Comparator::Le: ok = v <= c; break;
      case dp::Comparator::Ge: ok = v >= c; break;
      default: throw Error("unexpected comparator");
    }
    if (!ok) return false;
  }
  return true;
}

std::vector<std::string> bundle_bytes(const ReportBundle& b) {
  std::vector<std::string> out{b.text()};
  nlohmann::json j = b.to_json();
  j.erase("generated_at");
  out.push_back(j.dump());
  for (const auto& t : b.training) out.push_back(trace::to_text(t));
  for (const auto& t : b.test) out.push_back(trace::to_text(t));
  return out;
}

}  // namespace

int main() {
  std::cout << "acceptance (tumbling windows, fast socket replay where noted)" << std::endl;

  const auto t0 = std::chrono::steady_clock::now();
  ReportBundle baseline, shifted, pump;
  double baseline_s = 0.0;
  try {
    baseline = experiment::run_experiment(pinned(Scenario::CloggedPipe, false, replay::Mode::Socket));
    baseline_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    shifted = experiment::run_experiment(pinned(Scenario::CloggedPipe, true, replay::Mode::InProcess));
    pump = experiment::run_experiment(pinned(Scenario::FailingPump, false, replay::Mode::InProcess));
  } catch (const std::exception& e) {
    std::cout << "experiment setup failed: " << e.what() << std::endl;
  }
  const std::array<const ReportBundle*, 3> bundles{&baseline, &shifted, &pump};

  report(1, "baseline clogged pipe, all scores 1.0, runtime < 120 s", [&] {
    const auto& w = baseline.windows;
    std::ostringstream d;
    d << w.decision_points << " decision windows, confusion " << confusion(w) << ", " << baseline.test.size()
      << " socket-replayed test runs, " << baseline_s << " s";
    return Line{all_ones(w) && baseline.test.size() == 30 && baseline_s < 120.0, d.str()};
  });

  report(2, "shifted start, error recall 1.0 and no downward errors", [&] {
    const auto& w = shifted.windows;
    std::ostringstream d;
    d << "error recall " << w[Severity::Error].recall << ", upward " << w.upward_errors() << ", downward "
      << w.downward_errors() << ", confusion " << confusion(w);
    return Line{!w.empty() && w[Severity::Error].recall == 1.0 && w.downward_errors() == 0, d.str()};
  });

  report(3, "failing pump, error recall 1.0 and confusion only warning->error", [&] {
    const auto& w = pump.windows;
    std::size_t other = 0;
    for (int t = 0; t < 3; ++t) {
      for (int p = 0; p < 3; ++p) {
        if (t != p && !(t == 1 && p == 2)) other += w.counts[t][p];
      }
    }
    std::ostringstream d;
    d << "window " << pump.plan.validator.window << ", error recall " << w[Severity::Error].recall
      << ", confusion " << confusion(w) << ", min f1 "
      << std::min({w.scores[0].f1, w.scores[1].f1, w.scores[2].f1});
    return Line{!w.empty() && pump.plan.validator.window == 90 && w[Severity::Error].recall == 1.0 && other == 0,
                d.str()};
  });

  report(4, "constraint audit of built programs and a multiply mutant", [&] {
    bool ok = true;
    std::size_t instructions = 0;
    for (Scenario sc : {Scenario::CloggedPipe, Scenario::FailingPump}) {
      for (auto mode : {validator::WindowMode::Sliding, validator::WindowMode::Tumbling}) {
        const auto r = dp::audit(validator::build_program(validator::default_spec(sc, mode)));
        ok &= r.pass() && r.count(dp::OpClass::Forbidden) == 0;
        instructions += r.entries.size();
      }
    }
    dp::PipelineProgram mutant = validator::build_program(validator::default_spec(Scenario::CloggedPipe));
    mutant.stages.back().ops.push_back(dp::ops::binary(dp::OpCode::Mul, "diff", dp::Operand::variable("diff"),
                                                       dp::Operand::constant(3)));
    const auto m = dp::audit(mutant);
    bool refused = false;
    try {
      dp::Pipeline{mutant};
    } catch (const ProgramError&) {
      refused = true;
    }
    ok &= !m.pass() && m.count(dp::OpClass::Forbidden) == 1 && refused;
    return Line{ok, std::to_string(instructions) + " instructions audited across 4 programs, mutant " +
                        (m.pass() ? "PASSED" : "FAILED") + (refused ? " and refused by the pipeline" : "")};
  });

  report(5, "pipeline labels equal reference labels on every test trace", [&] {
    std::size_t packets = 0, mismatches = 0, traces = 0;
    for (const ReportBundle* b : bundles) {
      for (const trace::Trace& t : b->test) {
        validator::ReferenceValidator ref(b->calibrated);
        for (const auto& r : t.records) {
          ++packets;
          if (!r.label || *r.label != ref.decide(r.message)) ++mismatches;
        }
        ++traces;
      }
    }
    return Line{traces == 90 && mismatches == 0,
                std::to_string(traces) + " traces, " + std::to_string(packets) + " packets, " +
                    std::to_string(mismatches) + " mismatches"};
  });

  report(6, "ring buffer and range table property suites", [&] {
    const auto ring = suites::ring_vs_queue(10000, 601);
    const auto range = suites::range_vs_scan(10000, 602);
    return Line{ring.cases >= 10000 && range.cases >= 10000 && ring.failures == 0 && range.failures == 0,
                "ring " + std::to_string(ring.cases) + " cases / " + std::to_string(ring.failures) +
                    " failures, range " + std::to_string(range.cases) + " cases / " +
                    std::to_string(range.failures) + " failures"};
  });

  report(7, "endpoint slope equals (n-1) x least-squares slope on noiseless ramps", [&] {
    const auto arith = suites::slope_fidelity(10000, 701);
    // The same through the data plane: an always-open gate and a ramp.
    auto g = oracle::rng(702);
    std::uniform_int_distribution<int> window(2, 120), step(-60, 60);
    std::size_t pipeline_cases = 0, pipeline_fail = 0;
    for (int c = 0; c < 300; ++c) {
      validator::ValidatorSpec spec = validator::default_spec(Scenario::CloggedPipe);
      spec.window = static_cast<std::uint32_t>(window(g));
      spec.gate.predicates = {{"L3", dp::Comparator::Ge, 0}};
      validator::Validator v(spec);
      const std::int64_t s = step(g), y0 = 10000;
      std::vector<std::int64_t> ys;
      for (std::uint32_t i = 0; i < spec.window + 5; ++i) {
        wire::ControlMessage m;
        m.seq = i;
        m.levels_mL[2] = static_cast<std::uint32_t>(y0 + s * i);
        ys.push_back(y0 + s * i);
        const auto out = v.on_packet(wire::encode(m));
        if (i + 1 < spec.window) continue;
        const std::vector<std::int64_t> win(ys.end() - spec.window, ys.end());
        const auto lsq = oracle::least_squares_slope(win);
        const auto label = wire::decode_label(*out);
        const std::int64_t endpoint = validator::slope_from_key(label.window_slope_biased);
        ++pipeline_cases;
        if (endpoint * lsq.den != static_cast<std::int64_t>(spec.window - 1) * lsq.num) ++pipeline_fail;
      }
    }
    return Line{arith.failures == 0 && pipeline_fail == 0,
                std::to_string(arith.cases) + " arithmetic ramps, " + std::to_string(pipeline_cases) +
                    " pipeline windows, " + std::to_string(arith.failures + pipeline_fail) + " mismatches"};
  });

  report(8, "score() equals the independent confusion oracle", [&] {
    const auto o = suites::metrics_vs_oracle(1000, 801);
    return Line{o.cases == 1000 && o.failures == 0,
                std::to_string(o.cases) + " random label vectors, " + std::to_string(o.failures) + " mismatches"};
  });

  report(9, "repeat runs give byte-identical traces and reports", [&] {
    std::size_t compared = 0, differing = 0;
    const std::array<ExperimentPlan, 3> plans{pinned(Scenario::CloggedPipe, false, replay::Mode::Socket),
                                              pinned(Scenario::CloggedPipe, true, replay::Mode::InProcess),
                                              pinned(Scenario::FailingPump, false, replay::Mode::InProcess)};
    for (std::size_t i = 0; i < plans.size(); ++i) {
      const auto a = bundle_bytes(*bundles[i]);
      const auto b = bundle_bytes(experiment::run_experiment(plans[i]));
      compared += a.size();
      if (a.size() != b.size()) return Line{false, "artifact count differs"};
      for (std::size_t k = 0; k < a.size(); ++k) differing += a[k] != b[k];
    }
    return Line{compared > 0 && differing == 0,
                std::to_string(compared) + " artifacts compared, " + std::to_string(differing) + " differ"};
  });

  report(10, "no label without an open gate and a filled window boundary", [&] {
    std::size_t packets = 0, closed = 0, violations = 0;
    for (const ReportBundle* b : bundles) {
      const auto& spec = b->calibrated;
      std::vector<trace::Trace> all = experiment::replay_all(b->training, spec, replay::Mode::InProcess, true);
      all.insert(all.end(), b->test.begin(), b->test.end());
      for (const trace::Trace& t : all) {
        for (std::size_t i = 0; i < t.records.size(); ++i) {
          const auto& r = t.records[i];
          ++packets;
          const bool filled = i + 1 >= spec.window;
          const bool boundary = spec.mode == validator::WindowMode::Sliding || (i + 1) % spec.window == 0;
          if (filled && boundary && independent_gate(spec, r.message)) continue;
          ++closed;
          if (!r.label || r.label->severity != Severity::NoDecision || r.label->window_slope_biased != 0) {
            ++violations;
          }
        }
      }
    }
    return Line{packets > 0 && violations == 0,
                std::to_string(packets) + " packets scanned, " + std::to_string(closed) + " without a decision slot, " +
                    std::to_string(violations) + " violations"};
  });

  std::cout << (failures == 0 ? "all criteria PASS" : std::to_string(failures) + " criteria FAIL") << std::endl;
  return failures == 0 ? 0 : 1;
}
