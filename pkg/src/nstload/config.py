"""Analysis configuration shared by the library, service and CLI."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace

from .errors import DataValidationError

REST_AGGREGATIONS = ("mean", "last")
SELECTION_MODES = ("forward", "forward_backward")
OUTPUT_FORMATS = ("text", "json", "csv")

# A threshold this close to 1 admits only candidates numerically
# uncorrelated with every already-selected variable.
PAPER_LITERAL_THRESHOLD = 1.0 - 1e-9


@dataclass(frozen=True)
class Config:
    """Knobs for the metric pipeline and the regression stage.

    Defaults: 2-minute metric windows, mean rest baseline, forward
    selection with a conventional 0.1 tolerance floor.
    """

    window_len_s: float = 120.0
    rest_agg: str = "mean"
    tolerance_threshold: float = 0.1
    paper_literal_tolerance: bool = False
    selection: str = "forward"
    min_improvement: float = 0.0
    temp_band: tuple[float, float] = (20.0, 45.0)
    output_format: str = "text"

    def __post_init__(self):
        if not (self.window_len_s > 0):
            raise DataValidationError("window_len_s must be positive", "config.window_len_s")
        if self.rest_agg not in REST_AGGREGATIONS:
            raise DataValidationError(
                f"rest_agg must be one of {REST_AGGREGATIONS}", "config.rest_agg"
            )
        if not (0 < self.tolerance_threshold <= 1):
            raise DataValidationError(
                "tolerance_threshold must be in (0, 1]", "config.tolerance_threshold"
            )
        if self.selection not in SELECTION_MODES:
            raise DataValidationError(
                f"selection must be one of {SELECTION_MODES}", "config.selection"
            )
        if self.min_improvement < 0:
            raise DataValidationError(
                "min_improvement must be >= 0", "config.min_improvement"
            )
        low, high = self.temp_band
        if not (low < high):
            raise DataValidationError("temp_band low must be < high", "config.temp_band")
        if self.output_format not in OUTPUT_FORMATS:
            raise DataValidationError(
                f"output_format must be one of {OUTPUT_FORMATS}", "config.output_format"
            )

    @property
    def effective_tolerance_threshold(self) -> float:
        return PAPER_LITERAL_THRESHOLD if self.paper_literal_tolerance else self.tolerance_threshold

    def to_dict(self) -> dict:
        return {
            "window_len_s": self.window_len_s,
            "rest_agg": self.rest_agg,
            "tolerance_threshold": self.tolerance_threshold,
            "paper_literal_tolerance": self.paper_literal_tolerance,
            "selection": self.selection,
            "min_improvement": self.min_improvement,
            "temp_band": list(self.temp_band),
            "output_format": self.output_format,
        }

    def digest(self) -> str:
        """Stable content hash, recorded as feature-table provenance."""
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def with_updates(self, **kwargs) -> "Config":
        return replace(self, **kwargs)
