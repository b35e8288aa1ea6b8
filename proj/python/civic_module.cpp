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
#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/operators.h>
#include <pybind11/stl.h>

#include "civic/config_json.hpp"
#include "civic/dataplane/audit.hpp"
#include "civic/error.hpp"
#include "civic/experiment.hpp"

namespace py = pybind11;
using namespace civic;

namespace {

// Structured values cross the boundary as JSON text; the Python package
// turns them into dicts.
validator::ValidatorSpec spec_from(const std::string& text) {
  return config::validator_spec_from_json(nlohmann::json::parse(text));
}

std::vector<trace::Trace> traces_from(const std::vector<std::string>& texts) {
  std::vector<trace::Trace> out;
  for (const std::string& t : texts) {
    std::istringstream in(t);
    out.push_back(trace::read_trace(in));
  }
  return out;
}

std::vector<std::string> texts_of(const std::vector<trace::Trace>& traces) {
  std::vector<std::string> out;
  for (const trace::Trace& t : traces) out.push_back(trace::to_text(t));
  return out;
}

py::bytes as_bytes(const wire::Bytes& b) {
  return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
}

wire::Bytes from_bytes(const py::bytes& b) {
  const std::string s = b;
  return wire::Bytes(s.begin(), s.end());
}

}  // namespace

PYBIND11_MODULE(_civic, m) {
  m.doc() = "civic: in-network validation of tank control traffic";

  auto base = py::register_exception<Error>(m, "CivicError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<EncodeError>(m, "EncodeError", base.ptr());
  py::register_exception<BuildError>(m, "BuildError", base.ptr());
  py::register_exception<ProgramError>(m, "ProgramError", base.ptr());
  py::register_exception<CalibrationError>(m, "CalibrationError", base.ptr());
  py::register_exception<ReplayError>(m, "ReplayError", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

  py::enum_<Severity>(m, "Severity")
      .value("NORMAL", Severity::Normal)
      .value("WARNING", Severity::Warning)
      .value("ERROR", Severity::Error)
      .value("NO_DECISION", Severity::NoDecision);

  py::enum_<Scenario>(m, "Scenario")
      .value("CLOGGED_PIPE", Scenario::CloggedPipe)
      .value("FAILING_PUMP", Scenario::FailingPump);

  py::class_<wire::ControlMessage>(m, "ControlMessage")
      .def(py::init<>())
      .def_readwrite("seq", &wire::ControlMessage::seq)
      .def_readwrite("timestamp_us", &wire::ControlMessage::timestamp_us)
      .def_readwrite("levels_mL", &wire::ControlMessage::levels_mL)
      .def_readwrite("pump_permille", &wire::ControlMessage::pump_permille)
      .def_readwrite("valve1_permille", &wire::ControlMessage::valve1_permille)
      .def_readwrite("valve2_permille", &wire::ControlMessage::valve2_permille)
      .def(py::self == py::self)
      .def("__repr__", [](const wire::ControlMessage& msg) {
        std::ostringstream o;
        o << "ControlMessage(seq=" << msg.seq << ", L=[" << msg.levels_mL[0] << ", " << msg.levels_mL[1]
          << ", " << msg.levels_mL[2] << ", " << msg.levels_mL[3] << "], P1=" << msg.pump_permille
          << ", V1=" << msg.valve1_permille << ", V2=" << msg.valve2_permille << ")";
        return o.str();
      });

  py::class_<wire::CivicLabel>(m, "CivicLabel")
      .def(py::init<>())
      .def_readwrite("severity", &wire::CivicLabel::severity)
      .def_readwrite("scenario", &wire::CivicLabel::scenario)
      .def_readwrite("window_slope_biased", &wire::CivicLabel::window_slope_biased)
      .def(py::self == py::self);

  m.attr("MESSAGE_SIZE") = wire::kMessageSize;
  m.attr("LABELED_SIZE") = wire::kLabeledSize;
  m.def("encode", [](const wire::ControlMessage& msg) { return as_bytes(wire::encode(msg)); });
  m.def("decode", [](const py::bytes& b) { return wire::decode(from_bytes(b)); });
  m.def("decode_label", [](const py::bytes& b) { return wire::decode_label(from_bytes(b)); });

  m.def("slope_key", &validator::slope_key, py::arg("oldest"), py::arg("newest"));
  m.def("slope_from_key", &validator::slope_from_key);
  m.def("key_from_slope", &validator::key_from_slope);

  m.def(
      "default_spec_json",
      [](Scenario s, const std::string& mode) {
        return config::to_json(validator::default_spec(s, validator::parse_window_mode(mode))).dump();
      },
      py::arg("scenario"), py::arg("mode") = "sliding");

  m.def("audit_json", [](const std::string& spec) {
    const auto r = dp::audit(validator::build_program(spec_from(spec)));
    return py::make_tuple(r.pass(), r.to_text());
  });

  py::class_<validator::Validator>(m, "Validator")
      .def(py::init([](const std::string& spec) { return validator::Validator(spec_from(spec)); }),
           py::arg("spec_json"))
      .def("on_packet",
           [](validator::Validator& v, const py::bytes& b) -> py::object {
             const auto out = v.on_packet(from_bytes(b));
             if (!out) return py::none();
             return as_bytes(*out);
           })
      .def_property_readonly("processed", &validator::Validator::processed)
      .def_property_readonly("dropped", &validator::Validator::dropped);

  m.def(
      "default_plan_json",
      [](Scenario s, bool shifted) { return experiment::to_json(experiment::default_plan(s, shifted)).dump(); },
      py::arg("scenario"), py::arg("shifted") = false);

  m.def(
      "simulate_json",
      [](const std::string& plan, const std::string& split) {
        const auto p = experiment::plan_from_json(nlohmann::json::parse(plan));
        if (split != "train" && split != "test") throw ConfigError("split must be 'train' or 'test'");
        py::gil_scoped_release release;
        return texts_of(experiment::simulate_split(
            p, split == "train" ? experiment::Split::Training : experiment::Split::Test));
      },
      py::arg("plan_json"), py::arg("split") = "train");

  m.def(
      "replay_json",
      [](const std::vector<std::string>& traces, const std::string& spec, const std::string& mode) {
        const auto t = traces_from(traces);
        const auto s = spec_from(spec);
        py::gil_scoped_release release;
        return texts_of(experiment::replay_all(t, s, replay::parse_mode(mode), true));
      },
      py::arg("traces"), py::arg("spec_json"), py::arg("mode") = "in-process");

  m.def("score_json", [](const std::vector<std::string>& traces) {
    const auto t = traces_from(traces);
    return nlohmann::json{{"windows", metrics::score(t).to_json()},
                          {"runs", metrics::score_runs_majority(t).to_json()}}
        .dump();
  });

  m.def("run_experiment_json", [](const std::string& plan) {
    const auto p = experiment::plan_from_json(nlohmann::json::parse(plan));
    experiment::ReportBundle b;
    {
      py::gil_scoped_release release;
      b = experiment::run_experiment(p);
    }
    return py::make_tuple(b.to_json().dump(), b.text());
  });
}
