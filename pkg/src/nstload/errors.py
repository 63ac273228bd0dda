"""Exception hierarchy shared across the pipeline.

Everything domain-level derives from NstLoadError so callers (CLI, HTTP
service) can map "bad data / bad request" separately from genuine I/O
failures, which stay plain OSError.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Problem:
    """One validation finding, pointing at the offending element."""

    location: str
    message: str

    def __str__(self) -> str:
        return f"{self.location}: {self.message}" if self.location else self.message


class NstLoadError(Exception):
    """Base class for all domain errors raised by this package."""


class DataValidationError(NstLoadError):
    """Input data violates a contract (manifest field, sample file, range).

    ``location`` points at the offending element, e.g.
    ``sessions[3].tlx.effort`` or ``s02_t1.csv:17``.
    """

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class InvalidSampleError(DataValidationError):
    """A temperature sample is non-finite or outside the plausibility band."""


class StudyValidationError(DataValidationError):
    """A study failed validation; carries the full list of findings."""

    def __init__(self, problems: list[Problem]):
        self.problems = list(problems)
        first = self.problems[0]
        more = f" (+{len(self.problems) - 1} more)" if len(self.problems) > 1 else ""
        super().__init__(first.message + more, first.location)


class EmptyIntervalError(NstLoadError):
    """A rest or task interval contains no samples."""


class WindowGapError(NstLoadError):
    """An interior analysis window contains no samples."""


class EmptySeriesError(NstLoadError):
    """An NST/WNST series is empty where a value is required."""


class InsufficientDataError(NstLoadError):
    """Too few rows for the requested fit."""


class SingularDesignError(NstLoadError):
    """Design matrix is rank-deficient (collinear or constant columns)."""


class DegenerateTargetError(NstLoadError):
    """Target has zero variance; R-squared is undefined."""


class UndefinedAdjustmentError(NstLoadError):
    """Adjusted R-squared undefined: n <= p + 1."""
