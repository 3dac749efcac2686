import math
from pathlib import Path

import pytest

import crossguard

SCENARIOS = Path(__file__).resolve().parents[2] / "scenarios"


def test_table_one_day():
    assert crossguard.format_percent(crossguard.accuracy(4582, 3826, 39, 93)) == "98.45%"


def test_window_probability_matches_complement():
    p = 0.843
    assert math.isclose(crossguard.window_detection_probability(p, 10, 1), 1 - (1 - p) ** 10, abs_tol=1e-15)


def test_per_frame_rate():
    assert crossguard.per_frame_rate("night", "train") == pytest.approx(0.843)


def test_monte_carlo_agrees():
    r = crossguard.monte_carlo("badweather", "trespasser", trials=20000, seed=4)
    assert r["trials"] == 20000
    assert r["agrees"]


def test_zero_trials_rejected():
    with pytest.raises(ValueError):
        crossguard.monte_carlo("day", "train", trials=0)


def test_run_and_replay():
    report, log = crossguard.run_scenario(SCENARIOS / "basic.json")
    assert report["safe"]
    assert report["trains"][0]["arrival_ms"] == 125000
    assert crossguard.replay(log) == report
    _, again = crossguard.run_scenario(SCENARIOS / "basic.json")
    assert again == log


def test_invalid_scenario(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"duration_s": 10}')
    with pytest.raises(crossguard.FieldError):
        crossguard.run_scenario(bad)
