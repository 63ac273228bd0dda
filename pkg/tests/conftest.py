"""Shared fixtures: a hand-worked golden session, a default synthetic
study, and a report injected with known table values for rendering."""

from __future__ import annotations

import pytest

from nstload import (
    Config,
    FittedModel,
    ModelReport,
    SessionRecording,
    StudyConfig,
    TemperatureSample,
    build_features,
    generate_records,
)

# Four task readings two minutes apart, after a rest whose NST is
# exactly 1.5. All downstream values are exact by hand: NST 2.7/2.6/
# 2.5/2.6, WNST 1.2/1.1/1.0/1.1, WMAX 1.2, WAVE 1.1, WSUM 4.4.
GOLDEN_PAIRS = ((32.2, 34.9), (32.1, 34.7), (32.3, 34.8), (32.1, 34.7))
GOLDEN_NST = (2.7, 2.6, 2.5, 2.6)
GOLDEN_REST = 1.5
GOLDEN_WNST = (1.2, 1.1, 1.0, 1.1)
GOLDEN_WMAX, GOLDEN_WAVE, GOLDEN_WSUM = 1.2, 1.1, 4.4


def golden_recording() -> SessionRecording:
    rest = [TemperatureSample(t, 32.0, 33.5) for t in (0.0, 60.0, 120.0)]
    task = [
        TemperatureSample(180.0 + 120.0 * i, fore, nas)
        for i, (fore, nas) in enumerate(GOLDEN_PAIRS)
    ]
    return SessionRecording(
        samples=tuple(rest + task),
        rest_interval=(0.0, 180.0),
        task_interval=(180.0, 660.0),
        subject_id="s01",
        task_id="t1",
    )


@pytest.fixture
def golden_session() -> SessionRecording:
    return golden_recording()


@pytest.fixture(scope="session")
def default_study():
    records, truth = generate_records(StudyConfig())
    return records, truth


@pytest.fixture(scope="session")
def default_table(default_study):
    records, _ = default_study
    return build_features(records, Config())


def _known_model(target, mode, selected, std, adj):
    return FittedModel(
        target=target,
        mode=mode,
        selected=tuple(selected),
        intercept=0.0,
        coefficients={name: 0.0 for name in selected},
        std_coefficients=std,
        r2=max(adj, 0.0),
        adj_r2=adj,
        n=14,
        tolerances={name: 1.0 for name in selected},
    )


# Reference cell values the text renderer must reproduce, including a
# negative adjusted R^2 and "-" cells for unselected variables.
REFERENCE_ADJ_R2 = {
    "time_only": (0.20, -0.06, 0.30, 0.01),
    "biometric_full": (0.27, 0.64, 0.56, 0.43),
}


def reference_report() -> ModelReport:
    """A report injected with already-known values, bypassing fitting."""
    models = (
        _known_model("mental_demand", "time_only", ["log_time"],
                     {"log_time": -0.80}, 0.20),
        _known_model("mental_demand", "biometric_full", ["wmax", "log_time"],
                     {"wmax": 0.46, "log_time": -0.80}, 0.27),
        _known_model("own_performance", "time_only", ["log_time"],
                     {"log_time": -0.67}, -0.06),
        _known_model("own_performance", "biometric_full", ["wave", "wsum", "log_time"],
                     {"wave": -1.10, "wsum": 1.22, "log_time": -0.67}, 0.64),
        _known_model("effort", "time_only", ["log_time"],
                     {"log_time": -1.25}, 0.30),
        _known_model("effort", "biometric_full", ["wave", "wsum", "log_time"],
                     {"wave": 0.31, "wsum": 0.63, "log_time": -1.25}, 0.56),
        _known_model("frustration", "time_only", ["log_time"],
                     {"log_time": -0.10}, 0.01),
        _known_model("frustration", "biometric_full", ["wmax", "wave"],
                     {"wmax": 0.68, "wave": -1.32}, 0.43),
    )
    return ModelReport(models=models, config=Config())


@pytest.fixture
def known_report() -> ModelReport:
    return reference_report()
