"""Level-crossing control: detection, confirmation, controller and simulator."""

import json

from ._core import (
    REFERENCE_DATA_VERSION,
    ArgumentError,
    Error,
    FieldError,
    accuracy,
    format_percent,
    monte_carlo,
    per_frame_rate,
    window_detection_probability,
)
from . import _core

__all__ = [
    "REFERENCE_DATA_VERSION",
    "ArgumentError",
    "Error",
    "FieldError",
    "accuracy",
    "format_percent",
    "monte_carlo",
    "per_frame_rate",
    "window_detection_probability",
    "run_scenario",
    "replay",
    "tables",
]


def run_scenario(path, seed=None):
    """Run a scenario file; returns (report dict, JSONL log text)."""
    out = json.loads(_core._run_scenario(str(path), seed))
    return out["report"], out["log"]


def replay(log_text):
    """Rebuild the report from a JSONL log."""
    return json.loads(_core._replay(log_text))


def tables(trials=100000, seed=1):
    return json.loads(_core._tables(trials, seed))
