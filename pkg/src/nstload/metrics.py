"""WNST series and the three summary measures WMAX, WAVE, WSUM.

WNST is the windowed task NST minus the rest-period NST baseline, which
cancels per-subject offsets. WMAX/WAVE/WSUM are its max/mean/sum over the
task; WSUM grows with window count, so the count is kept alongside it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import EmptySeriesError, InvalidSampleError
from .signal import NstSeries


@dataclass(frozen=True)
class WnstSeries:
    """Baseline-corrected NST per window; timestamps match the source series."""

    values: tuple[tuple[float, float], ...]
    rest_nst_c: float

    def wnst_values(self) -> list[float]:
        return [v for _, v in self.values]

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class MetricSet:
    wmax: float
    wave: float
    wsum: float
    n_windows: int


def wnst_series(nst: NstSeries, rest_nst_c: float) -> WnstSeries:
    """Subtract the rest baseline from every windowed NST value."""
    if not math.isfinite(rest_nst_c):
        raise InvalidSampleError("rest baseline is not finite")
    if not nst.values:
        raise EmptySeriesError("cannot baseline-correct an empty NST series")
    values = tuple((t, v - rest_nst_c) for t, v in nst.values)
    return WnstSeries(values=values, rest_nst_c=rest_nst_c)


def summarize(w: WnstSeries) -> MetricSet:
    """Reduce a WNST series to WMAX (max), WAVE (mean) and WSUM (sum)."""
    if not w.values:
        raise EmptySeriesError("cannot summarize an empty WNST series")
    vals = w.wnst_values()
    n = len(vals)
    wmax = max(vals)
    wmin = min(vals)
    wsum = math.fsum(vals)
    # fsum is exact but the division can land one ulp outside [min, max];
    # clamp so wmin <= wave <= wmax holds as an identity.
    wave = min(max(wsum / n, wmin), wmax)
    return MetricSet(wmax=wmax, wave=wave, wsum=wsum, n_windows=n)
