"""Raw paired temperature streams -> windowed NST series and rest baseline.

NST is the nasal-minus-forehead skin temperature difference. All intervals
are half-open ``[start_s, end_s)`` so a boundary sample belongs to exactly
one interval/window.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import (
    DataValidationError,
    EmptyIntervalError,
    InvalidSampleError,
    WindowGapError,
)

DEFAULT_WINDOW_LEN_S = 120.0
DEFAULT_TEMP_BAND_C = (20.0, 45.0)

SAMPLES_CSV_HEADER = ("time_s", "forehead_c", "nasal_c")


@dataclass(frozen=True)
class TemperatureSample:
    """One paired forehead/nasal reading, timed in seconds from session start."""

    time_s: float
    forehead_c: float
    nasal_c: float


@dataclass(frozen=True)
class NstSeries:
    """Windowed NST values: ``values`` holds (window_end_s, nst_c) pairs.

    Window ends are spaced by ``window_len_s`` except possibly the final
    (trailing partial) window.
    """

    window_len_s: float
    values: tuple[tuple[float, float], ...]

    def nst_values(self) -> list[float]:
        return [v for _, v in self.values]

    def window_ends(self) -> list[float]:
        return [t for t, _ in self.values]

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class SessionRecording:
    """An ordered sample stream with declared rest and task intervals.

    Construction enforces structural invariants (strictly increasing times,
    rest before task, at least one sample in each interval). Temperature
    plausibility is checked at ingest time where the band is configurable.
    """

    samples: tuple[TemperatureSample, ...]
    rest_interval: tuple[float, float]
    task_interval: tuple[float, float]
    subject_id: str
    task_id: str

    def __post_init__(self):
        if not self.samples:
            raise DataValidationError("recording has no samples", self._loc())
        prev = None
        for s in self.samples:
            if not math.isfinite(s.time_s):
                raise InvalidSampleError("non-finite time_s", self._loc())
            if prev is not None and s.time_s <= prev:
                raise DataValidationError(
                    f"sample times not strictly increasing at t={s.time_s}", self._loc()
                )
            prev = s.time_s
        for name, (a, b) in (("rest_interval", self.rest_interval),
                             ("task_interval", self.task_interval)):
            if not (math.isfinite(a) and math.isfinite(b) and a < b):
                raise DataValidationError(f"{name} must satisfy start < end", self._loc())
        if self.rest_interval[1] > self.task_interval[0]:
            raise DataValidationError(
                "rest_interval must end before task_interval starts", self._loc()
            )
        for name, interval in (("rest_interval", self.rest_interval),
                               ("task_interval", self.task_interval)):
            if not samples_in(self.samples, interval):
                raise EmptyIntervalError(f"{self._loc()}: {name} contains no samples")

    def _loc(self) -> str:
        return f"{self.subject_id}/{self.task_id}"


def nst(forehead_c: float, nasal_c: float) -> float:
    """Nasal-minus-forehead temperature difference in degrees Celsius."""
    if not (math.isfinite(forehead_c) and math.isfinite(nasal_c)):
        raise InvalidSampleError("non-finite temperature")
    return nasal_c - forehead_c


def validate_sample(
    sample: TemperatureSample,
    band: tuple[float, float] = DEFAULT_TEMP_BAND_C,
    location: str = "",
) -> None:
    """Reject non-finite readings and values outside the plausibility band."""
    low, high = band
    for field_name in ("forehead_c", "nasal_c"):
        value = getattr(sample, field_name)
        if not math.isfinite(value):
            raise InvalidSampleError(f"{field_name} is not finite", location)
        if not (low <= value <= high):
            raise InvalidSampleError(
                f"{field_name}={value} outside plausibility band [{low}, {high}] C",
                location,
            )


def samples_in(
    samples: Sequence[TemperatureSample], interval: tuple[float, float]
) -> list[TemperatureSample]:
    start, end = interval
    return [s for s in samples if start <= s.time_s < end]


def window_nst(
    recording: SessionRecording,
    interval: tuple[float, float],
    window_len_s: float = DEFAULT_WINDOW_LEN_S,
) -> NstSeries:
    """Partition ``interval`` into consecutive windows and average NST per window.

    Windows run from the interval start; each covers ``[w_start, w_end)``.
    A trailing partial window is emitted when it contains at least one
    sample. An empty window before the last populated one indicates a data
    gap and raises WindowGapError.
    """
    if not (window_len_s > 0):
        raise DataValidationError("window_len_s must be positive")
    start, end = interval
    inside = samples_in(recording.samples, interval)
    if not inside:
        raise EmptyIntervalError(
            f"interval [{start}, {end}) of {recording.subject_id}/{recording.task_id} "
            "contains no samples"
        )

    buckets: dict[int, list[float]] = {}
    for s in inside:
        idx = int((s.time_s - start) // window_len_s)
        buckets.setdefault(idx, []).append(nst(s.forehead_c, s.nasal_c))

    last_idx = max(buckets)
    values = []
    for idx in range(last_idx + 1):
        w_start = start + idx * window_len_s
        w_end = min(w_start + window_len_s, end)
        if idx not in buckets:
            raise WindowGapError(
                f"window [{w_start}, {w_end}) of {recording.subject_id}/"
                f"{recording.task_id} contains no samples"
            )
        vals = buckets[idx]
        values.append((w_end, math.fsum(vals) / len(vals)))
    return NstSeries(window_len_s=window_len_s, values=tuple(values))


def rest_baseline(recording: SessionRecording, agg: str = "mean") -> float:
    """Aggregate NST over the rest interval (``mean`` or ``last`` sample)."""
    inside = samples_in(recording.samples, recording.rest_interval)
    if not inside:
        raise EmptyIntervalError(
            f"rest interval of {recording.subject_id}/{recording.task_id} "
            "contains no samples"
        )
    nst_values = [nst(s.forehead_c, s.nasal_c) for s in inside]
    if agg == "mean":
        return math.fsum(nst_values) / len(nst_values)
    if agg == "last":
        return nst_values[-1]
    raise DataValidationError(f"unknown rest aggregation {agg!r}")


def read_samples_csv(
    path: str | Path, band: tuple[float, float] = DEFAULT_TEMP_BAND_C
) -> tuple[TemperatureSample, ...]:
    """Load a session sample file (header ``time_s,forehead_c,nasal_c``)."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataValidationError("empty sample file", str(path)) from None
        if tuple(h.strip() for h in header) != SAMPLES_CSV_HEADER:
            raise DataValidationError(
                f"expected header {','.join(SAMPLES_CSV_HEADER)}, got {','.join(header)}",
                str(path),
            )
        samples = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            loc = f"{path}:{lineno}"
            if len(row) != 3:
                raise DataValidationError(f"expected 3 columns, got {len(row)}", loc)
            try:
                t, fore, nas = (float(cell) for cell in row)
            except ValueError:
                raise DataValidationError(f"non-numeric cell in row {row}", loc) from None
            sample = TemperatureSample(time_s=t, forehead_c=fore, nasal_c=nas)
            validate_sample(sample, band, loc)
            if samples and t <= samples[-1].time_s:
                raise DataValidationError("time_s not strictly increasing", loc)
            samples.append(sample)
    return tuple(samples)


def samples_csv_text(samples: Iterable[TemperatureSample]) -> str:
    """Render samples in the canonical CSV format (round-trip float repr)."""
    lines = [",".join(SAMPLES_CSV_HEADER)]
    for s in samples:
        lines.append(f"{s.time_s!r},{s.forehead_c!r},{s.nasal_c!r}")
    return "\n".join(lines) + "\n"


def write_samples_csv(path: str | Path, samples: Iterable[TemperatureSample]) -> None:
    Path(path).write_text(samples_csv_text(samples), encoding="utf-8")
