# Copyright 2026 The civic Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#   http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Python bindings for the civic validator, simulator and experiment harness.

Specs, plans and reports are plain dicts; traces are their text form.
"""

import json

from ._civic import (
    LABELED_SIZE,
    MESSAGE_SIZE,
    BuildError,
    CalibrationError,
    CivicError,
    CivicLabel,
    ConfigError,
    ControlMessage,
    EncodeError,
    FormatError,
    NumericalError,
    ParseError,
    ProgramError,
    ReplayError,
    Scenario,
    Severity,
    decode,
    decode_label,
    encode,
    key_from_slope,
    slope_from_key,
    slope_key,
)
from . import _civic

__all__ = [
    "LABELED_SIZE", "MESSAGE_SIZE", "BuildError", "CalibrationError", "CivicError", "CivicLabel",
    "ConfigError", "ControlMessage", "EncodeError", "FormatError", "NumericalError", "ParseError",
    "ProgramError", "ReplayError", "Scenario", "Severity", "Validator", "audit", "decode",
    "decode_label", "default_plan", "default_spec", "encode", "key_from_slope", "replay",
    "run_experiment", "score", "simulate", "slope_from_key", "slope_key",
]


def default_spec(scenario=Scenario.CLOGGED_PIPE, mode="sliding"):
    return json.loads(_civic.default_spec_json(scenario, mode))


def default_plan(scenario=Scenario.CLOGGED_PIPE, shifted=False):
    return json.loads(_civic.default_plan_json(scenario, shifted))


def audit(spec):
    """(passed, report text) for the program compiled from `spec`."""
    return _civic.audit_json(json.dumps(spec))


class Validator:
    """Data-plane validator; on_packet returns labelled bytes or None."""

    def __init__(self, spec):
        self._impl = _civic.Validator(json.dumps(spec))

    def on_packet(self, packet):
        return self._impl.on_packet(bytes(packet))

    @property
    def processed(self):
        return self._impl.processed

    @property
    def dropped(self):
        return self._impl.dropped


def simulate(plan, split="train"):
    return _civic.simulate_json(json.dumps(plan), split)


def replay(traces, spec, mode="in-process"):
    return _civic.replay_json(list(traces), json.dumps(spec), mode)


def score(traces):
    return json.loads(_civic.score_json(list(traces)))


def run_experiment(plan):
    """(report dict, report text)."""
    report, text = _civic.run_experiment_json(json.dumps(plan))
    return json.loads(report), text
