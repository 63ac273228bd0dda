"""Sample validation, windowed NST extraction, and CSV round trips."""

from __future__ import annotations

import math

import numpy as np
import pytest

from nstload import (
    DataValidationError,
    EmptyIntervalError,
    InvalidSampleError,
    SessionRecording,
    TemperatureSample,
    WindowGapError,
    nst,
    read_samples_csv,
    rest_baseline,
    window_nst,
    write_samples_csv,
)
from nstload.signal import (
    SAMPLES_CSV_HEADER,
    samples_csv_text,
    samples_in,
    validate_sample,
)

from conftest import GOLDEN_NST, GOLDEN_PAIRS, GOLDEN_REST


def _recording(times, forehead, nasal, rest=(0.0, 180.0), task=(180.0, 660.0)):
    samples = tuple(
        TemperatureSample(t, f, n) for t, f, n in zip(times, forehead, nasal)
    )
    return SessionRecording(samples, rest, task, "s01", "t1")


def test_nst_is_nasal_minus_forehead():
    assert nst(32.2, 34.9) == pytest.approx(2.7, abs=1e-12)
    assert nst(34.9, 32.2) == pytest.approx(-2.7, abs=1e-12)
    assert nst(30.0, 30.0) == 0.0


@pytest.mark.parametrize("fore,nas", [(float("nan"), 34.0), (32.0, float("inf"))])
def test_nst_rejects_non_finite(fore, nas):
    with pytest.raises(InvalidSampleError):
        nst(fore, nas)


def test_validate_sample_band():
    validate_sample(TemperatureSample(0.0, 32.0, 34.0))
    with pytest.raises(InvalidSampleError, match="plausibility band"):
        validate_sample(TemperatureSample(0.0, 10.0, 34.0))
    with pytest.raises(InvalidSampleError, match="plausibility band"):
        validate_sample(TemperatureSample(0.0, 32.0, 50.0))
    with pytest.raises(InvalidSampleError, match="not finite"):
        validate_sample(TemperatureSample(0.0, float("nan"), 34.0))
    validate_sample(TemperatureSample(0.0, 10.0, 12.0), band=(5.0, 15.0))


def test_intervals_are_half_open():
    samples = tuple(TemperatureSample(float(t), 32.0, 34.0) for t in range(5))
    inside = samples_in(samples, (1.0, 3.0))
    assert [s.time_s for s in inside] == [1.0, 2.0]


def test_golden_session_nst_series(golden_session):
    series = window_nst(golden_session, golden_session.task_interval, 120.0)
    assert len(series) == 4
    for got, expected in zip(series.nst_values(), GOLDEN_NST):
        assert got == pytest.approx(expected, abs=1e-9)
    assert series.window_ends() == [300.0, 420.0, 540.0, 660.0]


def test_golden_session_rest_baseline(golden_session):
    assert rest_baseline(golden_session) == pytest.approx(GOLDEN_REST, abs=1e-12)
    assert rest_baseline(golden_session, agg="last") == pytest.approx(1.5, abs=1e-12)


def test_window_means_average_multiple_samples():
    times = [0.0, 10.0, 100.0, 110.0, 130.0]
    rec = _recording(times, [32.0] * 5, [33.0, 33.5, 34.5, 33.0, 34.0],
                     rest=(0.0, 50.0), task=(100.0, 200.0))
    series = window_nst(rec, (100.0, 200.0), 120.0)
    assert len(series) == 1
    assert series.nst_values()[0] == pytest.approx((2.5 + 1.0 + 2.0) / 3, abs=1e-12)


def test_trailing_partial_window_is_emitted():
    times = [0.0, 60.0, 120.0, 180.0, 250.0]
    rec = _recording(times, [32.0] * 5, [34.0] * 5,
                     rest=(0.0, 60.0), task=(60.0, 260.0))
    series = window_nst(rec, (60.0, 260.0), 120.0)
    assert series.window_ends() == [180.0, 260.0]


def test_interior_window_gap_raises():
    times = [0.0, 30.0, 60.0, 310.0]
    rec = _recording(times, [32.0] * 4, [34.0] * 4,
                     rest=(0.0, 50.0), task=(60.0, 400.0))
    with pytest.raises(WindowGapError, match=r"window \[180.0"):
        window_nst(rec, (60.0, 400.0), 120.0)


def test_empty_interval_raises():
    times = [0.0, 30.0, 200.0]
    rec = _recording(times, [32.0] * 3, [34.0] * 3,
                     rest=(0.0, 50.0), task=(100.0, 300.0))
    with pytest.raises(EmptyIntervalError):
        window_nst(rec, (400.0, 500.0), 120.0)


def test_rest_agg_last_uses_final_rest_sample():
    rec = _recording([0.0, 60.0, 120.0, 200.0],
                     [32.0, 32.0, 32.0, 32.0],
                     [33.0, 33.4, 33.8, 34.0],
                     rest=(0.0, 150.0), task=(150.0, 250.0))
    assert rest_baseline(rec, agg="mean") == pytest.approx(1.4, abs=1e-12)
    assert rest_baseline(rec, agg="last") == pytest.approx(1.8, abs=1e-12)
    with pytest.raises(DataValidationError):
        rest_baseline(rec, agg="median")


def test_recording_requires_increasing_times():
    samples = (TemperatureSample(0.0, 32.0, 34.0), TemperatureSample(0.0, 32.0, 34.0))
    with pytest.raises(DataValidationError, match="strictly increasing"):
        SessionRecording(samples, (0.0, 0.5), (0.5, 1.0), "s", "t")


def test_recording_requires_rest_before_task():
    samples = tuple(TemperatureSample(float(t), 32.0, 34.0) for t in range(10))
    with pytest.raises(DataValidationError, match="rest_interval must end before"):
        SessionRecording(samples, (0.0, 5.0), (4.0, 9.0), "s", "t")


def test_recording_requires_samples_in_each_interval():
    samples = tuple(TemperatureSample(float(t), 32.0, 34.0) for t in range(3))
    with pytest.raises(EmptyIntervalError):
        SessionRecording(samples, (0.0, 1.5), (5.0, 9.0), "s", "t")


def test_csv_round_trip(tmp_path, golden_session):
    path = tmp_path / "samples.csv"
    write_samples_csv(path, golden_session.samples)
    text = path.read_text()
    assert text.splitlines()[0] == ",".join(SAMPLES_CSV_HEADER)
    loaded = read_samples_csv(path)
    assert loaded == golden_session.samples
    assert samples_csv_text(loaded) == text


def test_csv_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("time,forehead,nasal\n0.0,32.0,34.0\n")
    with pytest.raises(DataValidationError, match="expected header"):
        read_samples_csv(path)


def test_csv_error_reports_file_and_line(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("time_s,forehead_c,nasal_c\n0.0,32.0,34.0\n10.0,oops,34.0\n")
    with pytest.raises(DataValidationError, match=r"bad.csv:3"):
        read_samples_csv(path)


def test_csv_rejects_non_increasing_time(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("time_s,forehead_c,nasal_c\n10.0,32.0,34.0\n10.0,32.0,34.0\n")
    with pytest.raises(DataValidationError, match="strictly increasing"):
        read_samples_csv(path)


def test_csv_rejects_out_of_band_values(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("time_s,forehead_c,nasal_c\n0.0,32.0,70.0\n")
    with pytest.raises(InvalidSampleError, match="plausibility band"):
        read_samples_csv(path)


def test_joint_offset_leaves_nst_unchanged():
    """Shifting both channels by the same constant cancels in NST."""
    rng = np.random.default_rng(11)
    for _ in range(100):
        fore = float(rng.uniform(31.0, 33.0))
        nas = float(rng.uniform(33.0, 35.0))
        shift = float(rng.uniform(-5.0, 5.0))
        assert nst(fore + shift, nas + shift) == pytest.approx(
            nst(fore, nas), abs=1e-10
        )


def test_window_values_match_hand_average(golden_session):
    for (fore, nas), expected in zip(GOLDEN_PAIRS, GOLDEN_NST):
        assert nst(fore, nas) == pytest.approx(expected, abs=1e-9)
