"""Study ingestion and feature assembly.

A study manifest (JSON) references per-session sample CSVs and carries the
simplified NASA-TLX answers. This module validates everything, runs the
signal/metrics pipeline per task, and produces the regression-ready
feature table: one row per (subject, task) with wmax/wave/wsum, the
log-transformed task time, and the four TLX targets.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .config import Config
from .errors import (
    DataValidationError,
    NstLoadError,
    Problem,
    StudyValidationError,
)
from .metrics import MetricSet, WnstSeries, summarize, wnst_series
from .signal import (
    NstSeries,
    SessionRecording,
    TemperatureSample,
    read_samples_csv,
    rest_baseline,
    window_nst,
)

TLX_FIELDS = ("mental_demand", "own_performance", "effort", "frustration")
DIFFICULTY_LABELS = ("easy", "difficult", "other")

FEATURE_CSV_HEADER = (
    "subject_id", "task_id", "wmax", "wave", "wsum", "log_time",
    "mental_demand", "own_performance", "effort", "frustration",
)


@dataclass(frozen=True)
class TlxResponse:
    """Simplified NASA-TLX answers; each subscale scored in [0, 100].

    Lower scores encode higher experienced load in this dataset's
    convention; values are stored as answered, never flipped.
    """

    mental_demand: float
    own_performance: float
    effort: float
    frustration: float

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in TLX_FIELDS}


@dataclass(frozen=True)
class TaskRecord:
    subject_id: str
    task_id: str
    difficulty: str
    task_time_min: float
    recording: SessionRecording
    tlx: TlxResponse


@dataclass(frozen=True)
class FeatureRow:
    subject_id: str
    task_id: str
    wmax: float
    wave: float
    wsum: float
    log_time: float
    tlx: TlxResponse


@dataclass(frozen=True)
class Provenance:
    manifest_path: str | None
    config_digest: str


@dataclass(frozen=True)
class FeatureTable:
    rows: tuple[FeatureRow, ...]
    provenance: Provenance

    def __post_init__(self):
        seen = set()
        for row in self.rows:
            key = (row.subject_id, row.task_id)
            if key in seen:
                raise DataValidationError(
                    f"duplicate (subject_id, task_id) pair {key}"
                )
            seen.add(key)

    def __len__(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class SessionMetrics:
    """Per-task pipeline output kept together for reporting."""

    subject_id: str
    task_id: str
    rest_nst_c: float
    nst: NstSeries
    wnst: WnstSeries
    metrics: MetricSet


def compute_session_metrics(recording: SessionRecording, config: Config) -> SessionMetrics:
    """Run the signal+metrics pipeline on one recording."""
    rest = rest_baseline(recording, agg=config.rest_agg)
    series = window_nst(recording, recording.task_interval, config.window_len_s)
    corrected = wnst_series(series, rest)
    return SessionMetrics(
        subject_id=recording.subject_id,
        task_id=recording.task_id,
        rest_nst_c=rest,
        nst=series,
        wnst=corrected,
        metrics=summarize(corrected),
    )


# ---------------------------------------------------------------------------
# Manifest reading and validation


def read_study_file(path: str | Path, config: Config = Config()) -> dict:
    """Load a manifest plus referenced sample CSVs into a resolved study dict.

    I/O failures (missing manifest or CSV) propagate as OSError. Structural
    problems inside a sample CSV are stashed per session as
    ``samples_problem`` so validation can report them in place.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise DataValidationError(f"manifest is not valid JSON: {e}", str(path)) from None
    if not isinstance(doc, dict) or not isinstance(doc.get("sessions"), list):
        raise DataValidationError('manifest must be {"sessions": [...]}', str(path))

    sessions = []
    for i, sess in enumerate(doc["sessions"]):
        if not isinstance(sess, dict):
            raise DataValidationError("session entry must be an object", f"{path}:sessions[{i}]")
        resolved = dict(sess)
        if "samples" not in resolved:
            csv_ref = resolved.get("samples_csv")
            if not isinstance(csv_ref, str) or not csv_ref:
                resolved["samples_problem"] = "missing samples_csv path"
            else:
                csv_path = Path(csv_ref)
                if not csv_path.is_absolute():
                    csv_path = path.parent / csv_path
                try:
                    loaded = read_samples_csv(csv_path, config.temp_band)
                except DataValidationError as e:
                    resolved["samples_problem"] = str(e)
                else:
                    resolved["samples"] = [
                        (s.time_s, s.forehead_c, s.nasal_c) for s in loaded
                    ]
        sessions.append(resolved)
    return {"sessions": sessions}


def _num(value) -> float | None:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return None
    return float(value)


def _interval(value) -> tuple[float, float] | None:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        return None
    a, b = _num(value[0]), _num(value[1])
    if a is None or b is None or not (math.isfinite(a) and math.isfinite(b)):
        return None
    return (a, b)


def _session_problems(sess: dict, loc: str, config: Config) -> list[Problem]:
    problems: list[Problem] = []

    for key in ("subject_id", "task_id"):
        if not isinstance(sess.get(key), str) or not sess.get(key):
            problems.append(Problem(f"{loc}.{key}", "missing or empty identifier"))

    difficulty = sess.get("difficulty", "other")
    if not isinstance(difficulty, str) or difficulty.lower() not in DIFFICULTY_LABELS:
        problems.append(Problem(
            f"{loc}.difficulty", f"must be one of {DIFFICULTY_LABELS}, got {difficulty!r}"
        ))

    time_min = _num(sess.get("task_time_min"))
    if time_min is None or not math.isfinite(time_min) or time_min <= 0:
        problems.append(Problem(
            f"{loc}.task_time_min",
            f"must be a positive number (log transform), got {sess.get('task_time_min')!r}",
        ))

    tlx = sess.get("tlx")
    if not isinstance(tlx, dict):
        problems.append(Problem(f"{loc}.tlx", "missing tlx object"))
    else:
        for name in TLX_FIELDS:
            score = _num(tlx.get(name))
            if score is None or not math.isfinite(score):
                problems.append(Problem(f"{loc}.tlx.{name}", "missing or non-numeric score"))
            elif not (0 <= score <= 100):
                problems.append(Problem(
                    f"{loc}.tlx.{name}", f"score {score} outside [0, 100]"
                ))

    rest = _interval(sess.get("rest_interval_s"))
    task = _interval(sess.get("task_interval_s"))
    if rest is None:
        problems.append(Problem(f"{loc}.rest_interval_s", "must be [start_s, end_s]"))
    elif rest[0] >= rest[1]:
        problems.append(Problem(f"{loc}.rest_interval_s", "start must be < end"))
    if task is None:
        problems.append(Problem(f"{loc}.task_interval_s", "must be [start_s, end_s]"))
    elif task[0] >= task[1]:
        problems.append(Problem(f"{loc}.task_interval_s", "start must be < end"))
    if rest and task and rest[0] < rest[1] and task[0] < task[1] and rest[1] > task[0]:
        problems.append(Problem(
            f"{loc}.task_interval_s",
            f"rest interval {list(rest)} must end before task interval {list(task)} starts",
        ))

    if "samples_problem" in sess:
        problems.append(Problem(f"{loc}.samples_csv", str(sess["samples_problem"])))
        return problems

    samples = sess.get("samples")
    if not isinstance(samples, (list, tuple)) or not samples:
        problems.append(Problem(f"{loc}.samples", "no samples"))
        return problems

    low, high = config.temp_band
    prev_t = None
    ok = True
    for j, row in enumerate(samples):
        row_loc = f"{loc}.samples[{j}]"
        if not isinstance(row, (list, tuple)) or len(row) != 3:
            problems.append(Problem(row_loc, "expected (time_s, forehead_c, nasal_c)"))
            ok = False
            break
        t, fore, nas = (_num(v) for v in row)
        if t is None or fore is None or nas is None or not all(
            math.isfinite(v) for v in (t, fore, nas)
        ):
            problems.append(Problem(row_loc, "non-numeric or non-finite sample"))
            ok = False
            break
        for name, value in (("forehead_c", fore), ("nasal_c", nas)):
            if not (low <= value <= high):
                problems.append(Problem(
                    row_loc, f"{name}={value} outside plausibility band [{low}, {high}] C"
                ))
                ok = False
        if prev_t is not None and t <= prev_t:
            problems.append(Problem(row_loc, "time_s not strictly increasing"))
            ok = False
            break
        prev_t = t
    if not ok:
        return problems

    times = [float(row[0]) for row in samples]
    for name, interval in (("rest_interval_s", rest), ("task_interval_s", task)):
        if interval and interval[0] < interval[1]:
            if not any(interval[0] <= t < interval[1] for t in times):
                problems.append(Problem(
                    f"{loc}.{name}", f"interval {list(interval)} contains no samples"
                ))
    return problems


def validate_study(study: dict, config: Config = Config()) -> list[Problem]:
    """Collect every validation finding for a resolved study dict."""
    problems: list[Problem] = []
    sessions = study.get("sessions")
    if not isinstance(sessions, list):
        return [Problem("sessions", "manifest must contain a sessions list")]
    seen: dict[tuple, str] = {}
    for i, sess in enumerate(sessions):
        loc = f"sessions[{i}]"
        if not isinstance(sess, dict):
            problems.append(Problem(loc, "session entry must be an object"))
            continue
        problems.extend(_session_problems(sess, loc, config))
        key = (sess.get("subject_id"), sess.get("task_id"))
        if all(isinstance(k, str) for k in key):
            if key in seen:
                problems.append(Problem(
                    f"{loc}", f"duplicate (subject_id, task_id) pair {key}, first at {seen[key]}"
                ))
            else:
                seen[key] = loc
    return problems


def records_from_study(study: dict, config: Config = Config()) -> list[TaskRecord]:
    """Build fully validated TaskRecords; raises on the first finding."""
    problems = validate_study(study, config)
    if problems:
        raise StudyValidationError(problems)
    records = []
    for sess in study["sessions"]:
        samples = tuple(
            TemperatureSample(time_s=float(t), forehead_c=float(f), nasal_c=float(n))
            for t, f, n in sess["samples"]
        )
        recording = SessionRecording(
            samples=samples,
            rest_interval=tuple(float(v) for v in sess["rest_interval_s"]),
            task_interval=tuple(float(v) for v in sess["task_interval_s"]),
            subject_id=sess["subject_id"],
            task_id=sess["task_id"],
        )
        tlx = TlxResponse(**{name: float(sess["tlx"][name]) for name in TLX_FIELDS})
        records.append(TaskRecord(
            subject_id=sess["subject_id"],
            task_id=sess["task_id"],
            difficulty=str(sess.get("difficulty", "other")).lower(),
            task_time_min=float(sess["task_time_min"]),
            recording=recording,
            tlx=tlx,
        ))
    return records


def load_manifest(path: str | Path, config: Config = Config()) -> list[TaskRecord]:
    """Read and validate a study from disk: JSON manifest plus sample CSVs."""
    return records_from_study(read_study_file(path, config), config)


# ---------------------------------------------------------------------------
# Feature table


def build_features(
    records: Sequence[TaskRecord],
    config: Config = Config(),
    manifest_path: str | None = None,
) -> FeatureTable:
    """One FeatureRow per record: biometric metrics + log task time + targets."""
    rows = []
    for rec in records:
        try:
            session = compute_session_metrics(rec.recording, config)
        except NstLoadError as e:
            tag = f"{rec.subject_id}/{rec.task_id}"
            if not str(e).startswith(tag):
                e.args = (f"{tag}: {e}",)
            raise
        m = session.metrics
        rows.append(FeatureRow(
            subject_id=rec.subject_id,
            task_id=rec.task_id,
            wmax=m.wmax,
            wave=m.wave,
            wsum=m.wsum,
            log_time=math.log(rec.task_time_min),
            tlx=rec.tlx,
        ))
    return FeatureTable(
        rows=tuple(rows),
        provenance=Provenance(manifest_path=manifest_path, config_digest=config.digest()),
    )


def feature_table_csv(table: FeatureTable) -> str:
    """Canonical CSV export (round-trip float repr, fixed column order)."""
    lines = [",".join(FEATURE_CSV_HEADER)]
    for row in table.rows:
        tlx = row.tlx
        lines.append(",".join([
            row.subject_id, row.task_id,
            repr(row.wmax), repr(row.wave), repr(row.wsum), repr(row.log_time),
            repr(tlx.mental_demand), repr(tlx.own_performance),
            repr(tlx.effort), repr(tlx.frustration),
        ]))
    return "\n".join(lines) + "\n"


def study_metrics(records: Iterable[TaskRecord], config: Config = Config()) -> list[SessionMetrics]:
    """Pipeline metrics for every task, in record order."""
    return [compute_session_metrics(rec.recording, config) for rec in records]
