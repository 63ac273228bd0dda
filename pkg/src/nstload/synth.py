"""Seeded synthetic study generator with a known ground truth.

Temperature model: each session holds a latent NST deviation state that
relaxes with a first-order lag toward a target level. The pre-task rest
target sits rest_drop_c below the subject's relaxed baseline
(anticipatory arousal); during the task the target is load_scale_c times
the phase load below baseline, so higher load pulls the nasal
temperature (and hence NST) further down. Forehead temperature stays at
its base value. I.i.d. Gaussian noise is added per sample and channel.

Task-window NST minus the rest baseline is therefore positive whenever
the rest drop exceeds the load-induced drop, and raising the load in
every phase lowers every task-window value.

TLX targets come from configurable linear relations on the
pipeline-computed features (wmax, wave, wsum, log_time) plus seeded
noise, clipped to the 0..100 questionnaire range.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .config import Config
from .errors import DataValidationError
from .features import TLX_FIELDS, TaskRecord, TlxResponse, compute_session_metrics
from .signal import (
    DEFAULT_WINDOW_LEN_S,
    SessionRecording,
    TemperatureSample,
    samples_csv_text,
)

PHASE_KINDS = ("planning", "typing", "debugging")


@dataclass(frozen=True)
class Phase:
    kind: str
    duration_s: float
    load_level: float

    def __post_init__(self):
        if self.kind not in PHASE_KINDS:
            raise DataValidationError(
                f"phase kind must be one of {PHASE_KINDS}, got {self.kind!r}"
            )
        if not (math.isfinite(self.duration_s) and self.duration_s > 0):
            raise DataValidationError(f"phase duration must be positive, got {self.duration_s}")
        if not (0.0 <= self.load_level <= 1.0):
            raise DataValidationError(f"load level must be in [0, 1], got {self.load_level}")


@dataclass(frozen=True)
class LoadProfile:
    phases: tuple[Phase, ...]
    noise_sd_c: float = 0.02
    subject_baseline_nst_c: float = 2.6
    rest_duration_s: float = 180.0
    rest_drop_c: float = 1.15
    load_scale_c: float = 1.0
    lag_tau_s: float = 60.0
    forehead_base_c: float = 32.2

    def __post_init__(self):
        if not self.phases:
            raise DataValidationError("profile needs at least one phase")
        for name in ("rest_duration_s", "lag_tau_s"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DataValidationError(f"{name} must be positive, got {v}")
        for name in ("noise_sd_c", "rest_drop_c", "load_scale_c"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise DataValidationError(f"{name} must be >= 0, got {v}")
        for name in ("subject_baseline_nst_c", "forehead_base_c"):
            if not math.isfinite(getattr(self, name)):
                raise DataValidationError(f"{name} must be finite")

    @property
    def task_duration_s(self) -> float:
        return float(sum(p.duration_s for p in self.phases))


@dataclass(frozen=True)
class SessionTruth:
    """Noise-free view of one generated session."""

    subject_id: str
    task_id: str
    difficulty: str
    profile: LoadProfile
    true_rest_nst_c: float
    true_wnst: tuple[float, ...]


@dataclass(frozen=True)
class TargetRelation:
    """True linear link from features to one TLX subscale.

    noise_sd is an absolute score sd; noise_relative, when set, overrides
    it with that fraction of the deterministic scores' sample sd.
    """

    intercept: float
    coefficients: dict[str, float]
    noise_sd: float = 0.0
    noise_relative: float | None = None

    def __post_init__(self):
        allowed = ("wmax", "wave", "wsum", "log_time")
        for name in self.coefficients:
            if name not in allowed:
                raise DataValidationError(
                    f"relation coefficient names must be in {allowed}, got {name!r}"
                )
        if self.noise_sd < 0:
            raise DataValidationError("noise_sd must be >= 0")
        if self.noise_relative is not None and self.noise_relative < 0:
            raise DataValidationError("noise_relative must be >= 0")


@dataclass(frozen=True)
class GroundTruth:
    seed: int
    relations: dict[str, TargetRelation]
    sessions: tuple[SessionTruth, ...]


def default_relations() -> dict[str, TargetRelation]:
    """Lower scores under higher load: positive weights on the (load-
    lowered) biometric metrics, negative weights on log task time."""
    return {
        "mental_demand": TargetRelation(62.0, {"wmax": 10.0, "log_time": -14.0}, noise_sd=5.0),
        "own_performance": TargetRelation(30.0, {"wave": 30.0, "log_time": -6.0}, noise_sd=5.0),
        "effort": TargetRelation(70.0, {"wsum": 5.0, "log_time": -18.0}, noise_sd=5.0),
        "frustration": TargetRelation(35.0, {"wmax": 25.0, "wave": -10.0}, noise_sd=6.0),
    }


@dataclass(frozen=True)
class StudyConfig:
    n_subjects: int = 7
    tasks_per_subject: int = 2
    seed: int = 42
    sample_period_s: float = 10.0
    rest_duration_s: float = 180.0
    easy_minutes: tuple[float, float] = (5.4, 8.4)
    difficult_minutes: tuple[float, float] = (11.1, 15.1)
    easy_load: tuple[float, float] = (0.25, 0.40)
    difficult_load: tuple[float, float] = (0.42, 0.55)
    baseline_nst_c: tuple[float, float] = (2.3, 2.9)
    rest_drop_c: tuple[float, float] = (1.10, 1.30)
    load_scale_c: float = 1.0
    lag_tau_s: float = 45.0
    noise_sd_c: float = 0.02
    # (kind, share of task duration, load multiplier) per phase
    phase_template: tuple[tuple[str, float, float], ...] = (
        ("planning", 0.20, 0.90),
        ("typing", 0.55, 0.80),
        ("debugging", 0.25, 1.30),
    )
    phase_jitter: float = 0.15
    relations: dict[str, TargetRelation] = field(default_factory=default_relations)

    def __post_init__(self):
        if self.n_subjects < 1 or self.tasks_per_subject < 1:
            raise DataValidationError("need at least one subject and one task")
        if self.sample_period_s <= 0:
            raise DataValidationError("sample_period_s must be positive")
        for name in ("easy_minutes", "difficult_minutes", "easy_load",
                     "difficult_load", "baseline_nst_c", "rest_drop_c"):
            lo, hi = getattr(self, name)
            if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
                raise DataValidationError(f"{name} must be a (low, high) range")
        if not 0 <= self.phase_jitter < 1:
            raise DataValidationError("phase_jitter must be in [0, 1)")
        if not self.phase_template:
            raise DataValidationError("phase_template needs at least one phase")
        for target in self.relations:
            if target not in TLX_FIELDS:
                raise DataValidationError(f"unknown relation target {target!r}")
        for target in TLX_FIELDS:
            if target not in self.relations:
                raise DataValidationError(f"missing relation for target {target!r}")


# ---------------------------------------------------------------------------
# Session generation


def _state_series(profile: LoadProfile, times: np.ndarray) -> np.ndarray:
    """NST deviation from the subject baseline at each sample time.

    Piecewise-exact first-order lag: within a constant-target segment of
    length h, s -> target + (s - target) * exp(-h / tau). The state
    starts settled at the rest target.
    """
    segments = [(profile.rest_duration_s, -profile.rest_drop_c)]
    t_end = profile.rest_duration_s
    for phase in profile.phases:
        t_end += phase.duration_s
        segments.append((t_end, -profile.load_scale_c * phase.load_level))

    s = -profile.rest_drop_c
    tau = profile.lag_tau_s
    out = np.empty(times.shape[0])
    prev_t = 0.0
    seg_i = 0
    for k, t in enumerate(times):
        while prev_t < t:
            seg_end, target = segments[seg_i]
            step_end = min(float(t), seg_end)
            h = step_end - prev_t
            if h > 0:
                s = target + (s - target) * math.exp(-h / tau)
            prev_t = step_end
            if prev_t >= seg_end and seg_i < len(segments) - 1:
                seg_i += 1
        out[k] = s
    return out


def _recording(profile: LoadProfile, times, nst_dev, nasal_noise, fore_noise,
               subject_id: str, task_id: str) -> SessionRecording:
    total = profile.rest_duration_s + profile.task_duration_s
    samples = tuple(
        TemperatureSample(
            time_s=float(t),
            forehead_c=float(profile.forehead_base_c + fn),
            nasal_c=float(
                profile.forehead_base_c + profile.subject_baseline_nst_c + dev + nn
            ),
        )
        for t, dev, nn, fn in zip(times, nst_dev, nasal_noise, fore_noise)
    )
    return SessionRecording(
        samples=samples,
        rest_interval=(0.0, profile.rest_duration_s),
        task_interval=(profile.rest_duration_s, total),
        subject_id=subject_id,
        task_id=task_id,
    )


def generate_session(
    profile: LoadProfile,
    sample_period_s: float = 10.0,
    seed: int | Sequence[int] = 0,
    subject_id: str = "s01",
    task_id: str = "t1",
    difficulty: str = "other",
) -> tuple[SessionRecording, SessionTruth]:
    """One rest+task recording plus its noise-free ground truth."""
    if not (math.isfinite(sample_period_s) and sample_period_s > 0):
        raise DataValidationError(f"sample_period_s must be positive, got {sample_period_s}")
    total = profile.rest_duration_s + profile.task_duration_s
    n = int(math.ceil(total / sample_period_s))
    times = np.arange(n) * sample_period_s
    rng = np.random.default_rng(seed)
    nasal_noise = rng.normal(0.0, profile.noise_sd_c, n)
    fore_noise = rng.normal(0.0, profile.noise_sd_c, n)
    dev = _state_series(profile, times)

    recording = _recording(profile, times, dev, nasal_noise, fore_noise,
                           subject_id, task_id)

    zeros = np.zeros(n)
    clean = _recording(profile, times, dev, zeros, zeros, subject_id, task_id)
    metrics = compute_session_metrics(clean, Config(window_len_s=DEFAULT_WINDOW_LEN_S))
    truth = SessionTruth(
        subject_id=subject_id,
        task_id=task_id,
        difficulty=difficulty,
        profile=profile,
        true_rest_nst_c=metrics.rest_nst_c,
        true_wnst=tuple(metrics.wnst.wnst_values()),
    )
    return recording, truth


# ---------------------------------------------------------------------------
# Study generation


def _uniform(rng: np.random.Generator, bounds: tuple[float, float]) -> float:
    lo, hi = bounds
    return float(rng.uniform(lo, hi)) if hi > lo else float(lo)


def _session_profile(config: StudyConfig, rng: np.random.Generator,
                     difficulty: str) -> LoadProfile:
    if difficulty == "easy":
        minutes = _uniform(rng, config.easy_minutes)
        load = _uniform(rng, config.easy_load)
    else:
        minutes = _uniform(rng, config.difficult_minutes)
        load = _uniform(rng, config.difficult_load)
    baseline = _uniform(rng, config.baseline_nst_c)
    rest_drop = _uniform(rng, config.rest_drop_c)
    j = config.phase_jitter
    jitters = rng.uniform(1.0 - j, 1.0 + j, len(config.phase_template))
    duration_s = minutes * 60.0
    phases = tuple(
        Phase(
            kind=kind,
            duration_s=share * duration_s,
            load_level=min(1.0, max(0.0, load * mult * float(jit))),
        )
        for (kind, share, mult), jit in zip(config.phase_template, jitters)
    )
    return LoadProfile(
        phases=phases,
        noise_sd_c=config.noise_sd_c,
        subject_baseline_nst_c=baseline,
        rest_duration_s=config.rest_duration_s,
        rest_drop_c=rest_drop,
        load_scale_c=config.load_scale_c,
        lag_tau_s=config.lag_tau_s,
    )


def generate_records(config: StudyConfig = StudyConfig()) -> tuple[list[TaskRecord], GroundTruth]:
    """In-memory study: validated TaskRecords plus the ground truth."""
    study_rng = np.random.default_rng([config.seed, 0])
    sessions: list[tuple[SessionRecording, SessionTruth]] = []
    index = 0
    for i in range(config.n_subjects):
        for j in range(config.tasks_per_subject):
            difficulty = "easy" if j % 2 == 0 else "difficult"
            profile = _session_profile(config, study_rng, difficulty)
            sessions.append(generate_session(
                profile,
                sample_period_s=config.sample_period_s,
                seed=[config.seed, index + 1],
                subject_id=f"s{i + 1:02d}",
                task_id=f"t{j + 1}",
                difficulty=difficulty,
            ))
            index += 1

    pipeline_config = Config()
    features = []
    for recording, _ in sessions:
        m = compute_session_metrics(recording, pipeline_config).metrics
        task_s = recording.task_interval[1] - recording.task_interval[0]
        features.append({
            "wmax": m.wmax, "wave": m.wave, "wsum": m.wsum,
            "log_time": math.log(task_s / 60.0),
        })

    scores: dict[str, np.ndarray] = {}
    for t_idx, target in enumerate(TLX_FIELDS):
        relation = config.relations[target]
        det = np.array([
            relation.intercept
            + math.fsum(c * feats[name] for name, c in relation.coefficients.items())
            for feats in features
        ])
        sd = relation.noise_sd
        if relation.noise_relative is not None:
            sd = relation.noise_relative * float(np.std(det, ddof=1)) if len(det) > 1 else 0.0
        noise_rng = np.random.default_rng([config.seed, 7919, t_idx])
        scores[target] = np.clip(det + noise_rng.normal(0.0, sd, len(det)), 0.0, 100.0)

    records = []
    for row, (recording, truth) in enumerate(sessions):
        minutes = (recording.task_interval[1] - recording.task_interval[0]) / 60.0
        tlx = TlxResponse(**{t: float(scores[t][row]) for t in TLX_FIELDS})
        records.append(TaskRecord(
            subject_id=recording.subject_id,
            task_id=recording.task_id,
            difficulty=truth.difficulty,
            task_time_min=minutes,
            recording=recording,
            tlx=tlx,
        ))
    truth = GroundTruth(
        seed=config.seed,
        relations=dict(config.relations),
        sessions=tuple(t for _, t in sessions),
    )
    return records, truth


def study_files(config: StudyConfig = StudyConfig()) -> tuple[dict[str, str], GroundTruth]:
    """Manifest and CSV texts keyed by relative path, ready to write."""
    records, truth = generate_records(config)
    files: dict[str, str] = {}
    manifest = {"sessions": []}
    for rec in records:
        csv_rel = f"sessions/{rec.subject_id}_{rec.task_id}.csv"
        files[csv_rel] = samples_csv_text(rec.recording.samples)
        manifest["sessions"].append({
            "subject_id": rec.subject_id,
            "task_id": rec.task_id,
            "difficulty": rec.difficulty,
            "task_time_min": rec.task_time_min,
            "samples_csv": csv_rel,
            "rest_interval_s": list(rec.recording.rest_interval),
            "task_interval_s": list(rec.recording.task_interval),
            "tlx": rec.tlx.as_dict(),
        })
    files["manifest.json"] = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    return files, truth


def generate_study(config: StudyConfig = StudyConfig(),
                   out_dir: str | Path = "study") -> tuple[Path, GroundTruth]:
    """Write a manifest plus per-session CSVs; returns the manifest path."""
    out_dir = Path(out_dir)
    files, truth = study_files(config)
    for rel, text in files.items():
        path = out_dir / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    return out_dir / "manifest.json", truth


def relations_from_dict(doc: Mapping) -> dict[str, TargetRelation]:
    """Parse {"target": {"intercept", "coefficients", ...}} mappings."""
    relations = {}
    for target, entry in doc.items():
        relations[target] = TargetRelation(
            intercept=float(entry["intercept"]),
            coefficients={k: float(v) for k, v in entry["coefficients"].items()},
            noise_sd=float(entry.get("noise_sd", 0.0)),
            noise_relative=(
                None if entry.get("noise_relative") is None
                else float(entry["noise_relative"])
            ),
        )
    return relations
