"""Least squares fitting, stepwise selection, and report rendering.

One model per TLX subscale, in two candidate modes: the time-only
benchmark (log task time, always entered) and the biometric set
(wmax, wave, wsum, log_time) screened by forward stepwise selection
with a tolerance check against multicollinearity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .config import Config
from .errors import (
    DataValidationError,
    DegenerateTargetError,
    InsufficientDataError,
    NstLoadError,
    SingularDesignError,
    UndefinedAdjustmentError,
)
from .features import TLX_FIELDS, FeatureRow, FeatureTable

BIOMETRIC_CANDIDATES = ("wmax", "wave", "wsum", "log_time")
TIME_ONLY_CANDIDATES = ("log_time",)
MODES = ("time_only", "biometric_full")
TARGETS = TLX_FIELDS

TARGET_LABELS = {
    "mental_demand": "Mental demand",
    "own_performance": "Own performance",
    "effort": "Effort",
    "frustration": "Frustration",
}
MODE_LABELS = {
    "time_only": "time only",
    "biometric_full": "biometric full",
}


# ---------------------------------------------------------------------------
# Core estimators


@dataclass(frozen=True)
class OlsFit:
    names: tuple[str, ...]
    intercept: float
    coefficients: tuple[float, ...]
    residuals: tuple[float, ...]
    r2: float
    n: int


def _as_matrix(x) -> np.ndarray:
    a = np.asarray(x, dtype=float)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2:
        raise DataValidationError("design must be a 2-D array")
    return a


def _dependent_columns(x: np.ndarray, names: Sequence[str]) -> list[str]:
    """Greedy scan: a column is dependent if it adds no rank beyond the
    intercept and the independent columns that precede it."""
    kept = [np.ones(x.shape[0])]
    rank = 1
    dependent = []
    for j, name in enumerate(names):
        trial = np.column_stack(kept + [x[:, j]])
        trial_rank = int(np.linalg.matrix_rank(trial))
        if trial_rank == rank:
            dependent.append(name)
        else:
            kept.append(x[:, j])
            rank = trial_rank
    return dependent


def fit_ols(x, y, names: Sequence[str] | None = None) -> OlsFit:
    """Least squares with intercept via an orthogonalization-based solve."""
    x = _as_matrix(x)
    y = np.asarray(y, dtype=float).reshape(-1)
    n, p = x.shape
    if names is None:
        names = tuple(f"x{j}" for j in range(p))
    names = tuple(names)
    if len(names) != p:
        raise DataValidationError(f"{p} columns but {len(names)} names")
    if y.shape[0] != n:
        raise DataValidationError(f"{n} design rows but {y.shape[0]} target values")
    if n < p + 2:
        raise InsufficientDataError(
            f"need at least {p + 2} rows to fit {p} predictors with an intercept, got {n}"
        )
    if not np.isfinite(x).all():
        raise DataValidationError("design contains non-finite values")
    if not np.isfinite(y).all():
        raise DataValidationError("target contains non-finite values")
    for j, name in enumerate(names):
        if np.ptp(x[:, j]) == 0.0:
            raise SingularDesignError(f"column '{name}' is constant")
    sst = float(np.sum((y - y.mean()) ** 2))
    if sst == 0.0:
        raise DegenerateTargetError("target has zero variance")

    design = np.column_stack([np.ones(n), x])
    beta, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < p + 1:
        dependent = _dependent_columns(x, names) or list(names)
        raise SingularDesignError(
            "design is rank deficient; dependent columns: " + ", ".join(dependent)
        )
    residuals = y - design @ beta
    ssr = float(np.sum(residuals**2))
    return OlsFit(
        names=names,
        intercept=float(beta[0]),
        coefficients=tuple(float(b) for b in beta[1:]),
        residuals=tuple(float(r) for r in residuals),
        r2=1.0 - ssr / sst,
        n=n,
    )


def adjusted_r2(r2: float, n: int, p: int) -> float:
    """Shrink r2 for predictor count: 1 - (1 - r2)(n - 1)/(n - p - 1)."""
    if n <= p + 1:
        raise UndefinedAdjustmentError(
            f"adjustment undefined for n={n}, p={p}: requires n > p + 1"
        )
    return 1.0 - (1.0 - r2) * (n - 1) / (n - p - 1)


def standardized_coefficients(fit: OlsFit, x, y) -> tuple[float, ...]:
    """b_j * s_xj / s_y with sample (n-1) standard deviations."""
    x = _as_matrix(x)
    y = np.asarray(y, dtype=float).reshape(-1)
    s_y = float(np.std(y, ddof=1))
    if s_y == 0.0:
        raise DegenerateTargetError("target has zero variance")
    out = []
    for j, b in enumerate(fit.coefficients):
        s_x = float(np.std(x[:, j], ddof=1))
        if s_x == 0.0:
            raise SingularDesignError(f"column '{fit.names[j]}' has zero variance")
        out.append(b * s_x / s_y)
    return tuple(out)


def tolerance(candidate, selected) -> float:
    """1 - R^2 of the candidate regressed (with intercept) on the selected
    columns; 1.0 against an empty set, 0.0 for a constant candidate."""
    candidate = np.asarray(candidate, dtype=float).reshape(-1)
    if selected is None:
        return 1.0
    sel = np.asarray(selected, dtype=float)
    if sel.size == 0:
        return 1.0
    sel = _as_matrix(sel)
    if np.ptp(candidate) == 0.0:
        return 0.0
    aux = fit_ols(sel, candidate)
    return min(1.0, max(0.0, 1.0 - aux.r2))


# ---------------------------------------------------------------------------
# Model containers


@dataclass(frozen=True)
class FittedModel:
    target: str
    mode: str
    selected: tuple[str, ...]
    intercept: float
    coefficients: dict[str, float]
    std_coefficients: dict[str, float]
    r2: float
    adj_r2: float
    n: int
    tolerances: dict[str, float]

    def as_dict(self) -> dict:
        return {
            "target": self.target,
            "mode": self.mode,
            "selected": list(self.selected),
            "intercept": self.intercept,
            "coefficients": dict(self.coefficients),
            "std_coefficients": dict(self.std_coefficients),
            "r2": self.r2,
            "adj_r2": self.adj_r2,
            "n": self.n,
            "tolerances": dict(self.tolerances),
        }


@dataclass(frozen=True)
class FailedFit:
    target: str
    mode: str
    error: str

    def as_dict(self) -> dict:
        return {"target": self.target, "mode": self.mode, "error": self.error}


@dataclass(frozen=True)
class ModelReport:
    models: tuple[FittedModel | FailedFit, ...]
    config: Config

    def model_for(self, target: str, mode: str) -> FittedModel | FailedFit | None:
        for m in self.models:
            if m.target == target and m.mode == mode:
                return m
        return None

    def to_dict(self) -> dict:
        return {
            "models": [m.as_dict() for m in self.models],
            "config": self.config.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def report_from_dict(doc: Mapping) -> ModelReport:
    models: list[FittedModel | FailedFit] = []
    for entry in doc["models"]:
        if "error" in entry:
            models.append(FailedFit(
                target=entry["target"], mode=entry["mode"], error=entry["error"],
            ))
        else:
            models.append(FittedModel(
                target=entry["target"],
                mode=entry["mode"],
                selected=tuple(entry["selected"]),
                intercept=float(entry["intercept"]),
                coefficients={k: float(v) for k, v in entry["coefficients"].items()},
                std_coefficients={
                    k: float(v) for k, v in entry["std_coefficients"].items()
                },
                r2=float(entry["r2"]),
                adj_r2=float(entry["adj_r2"]),
                n=int(entry["n"]),
                tolerances={k: float(v) for k, v in entry["tolerances"].items()},
            ))
    cfg = dict(doc["config"])
    cfg["temp_band"] = tuple(cfg["temp_band"])
    return ModelReport(models=tuple(models), config=Config(**cfg))


def report_from_json(text: str) -> ModelReport:
    return report_from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# Selection


def _columns(table: FeatureTable) -> tuple[list[FeatureRow], dict[str, np.ndarray]]:
    # fixed row order makes every fitted quantity permutation invariant
    rows = sorted(table.rows, key=lambda r: (r.subject_id, r.task_id))
    cols = {
        "wmax": np.array([r.wmax for r in rows], dtype=float),
        "wave": np.array([r.wave for r in rows], dtype=float),
        "wsum": np.array([r.wsum for r in rows], dtype=float),
        "log_time": np.array([r.log_time for r in rows], dtype=float),
    }
    return rows, cols


def _target_vector(rows: Sequence[FeatureRow], target: str) -> np.ndarray:
    if target not in TLX_FIELDS:
        raise DataValidationError(f"unknown target '{target}'; expected one of {TLX_FIELDS}")
    return np.array([getattr(r.tlx, target) for r in rows], dtype=float)


def _finish(
    target: str,
    mode: str,
    selected: Sequence[str],
    tolerances: Mapping[str, float],
    cols: Mapping[str, np.ndarray],
    y: np.ndarray,
) -> FittedModel:
    n = int(y.shape[0])
    if not selected:
        return FittedModel(
            target=target, mode=mode, selected=(),
            intercept=float(y.mean()), coefficients={}, std_coefficients={},
            r2=0.0, adj_r2=0.0, n=n, tolerances={},
        )
    x = np.column_stack([cols[name] for name in selected])
    fit = fit_ols(x, y, selected)
    std = standardized_coefficients(fit, x, y)
    return FittedModel(
        target=target,
        mode=mode,
        selected=tuple(selected),
        intercept=fit.intercept,
        coefficients=dict(zip(fit.names, fit.coefficients)),
        std_coefficients=dict(zip(fit.names, std)),
        r2=fit.r2,
        adj_r2=adjusted_r2(fit.r2, n, len(selected)),
        n=n,
        tolerances={name: float(tolerances[name]) for name in selected},
    )


def stepwise_fit(
    table: FeatureTable,
    target: str,
    candidates: Sequence[str] = BIOMETRIC_CANDIDATES,
    config: Config = Config(),
    mode: str = "biometric_full",
) -> FittedModel:
    """Forward selection on adjusted R^2 with tolerance screening.

    A candidate is admissible when its tolerance against the already
    selected set is >= the configured threshold. Each step adds the
    admissible candidate with the highest refit adjusted R^2, provided
    the gain over the current model exceeds config.min_improvement.
    Ties fall to the earlier candidate in the given order. With
    selection="forward_backward", variables whose removal raises the
    adjusted R^2 are dropped afterwards. Falls back to the
    intercept-only model when nothing is admissible or improving.
    """
    if not candidates:
        raise DataValidationError("candidate set is empty")
    rows, cols = _columns(table)
    n = len(rows)
    if n < 3:
        raise InsufficientDataError(f"need at least 3 rows to fit models, got {n}")
    y = _target_vector(rows, target)
    if np.ptp(y) == 0.0:
        raise DegenerateTargetError(f"target '{target}' has zero variance")

    threshold = config.effective_tolerance_threshold
    selected: list[str] = []
    tolerances: dict[str, float] = {}
    current_adj = 0.0

    while True:
        best_name = None
        best_adj = None
        best_tol = None
        for name in candidates:
            if name in selected:
                continue
            if n < len(selected) + 3:
                continue  # refit would be underdetermined
            sel_matrix = (
                np.column_stack([cols[s] for s in selected]) if selected else None
            )
            tol = tolerance(cols[name], sel_matrix)
            if tol < threshold:
                continue
            trial = selected + [name]
            try:
                fit = fit_ols(np.column_stack([cols[s] for s in trial]), y, trial)
            except SingularDesignError:
                continue
            adj = adjusted_r2(fit.r2, n, len(trial))
            if best_adj is None or adj > best_adj:
                best_name, best_adj, best_tol = name, adj, tol
        if best_name is None or best_adj - current_adj <= config.min_improvement:
            break
        selected.append(best_name)
        tolerances[best_name] = best_tol
        current_adj = best_adj

    if config.selection == "forward_backward":
        improved = True
        while improved and selected:
            improved = False
            for name in [c for c in candidates if c in selected]:
                trial = [s for s in selected if s != name]
                if trial:
                    fit = fit_ols(np.column_stack([cols[s] for s in trial]), y, trial)
                    adj = adjusted_r2(fit.r2, n, len(trial))
                else:
                    adj = 0.0
                if adj > current_adj:
                    selected = trial
                    tolerances.pop(name)
                    current_adj = adj
                    improved = True
                    break

    return _finish(target, mode, selected, tolerances, cols, y)


def forced_fit(
    table: FeatureTable,
    target: str,
    names: Sequence[str] = TIME_ONLY_CANDIDATES,
    config: Config = Config(),
    mode: str = "time_only",
) -> FittedModel:
    """Fit with every named column entered unconditionally (benchmark
    semantics: no selection, negative adjusted R^2 allowed to surface).
    Tolerances are recorded sequentially in entry order."""
    if not names:
        raise DataValidationError("candidate set is empty")
    rows, cols = _columns(table)
    n = len(rows)
    if n < 3:
        raise InsufficientDataError(f"need at least 3 rows to fit models, got {n}")
    y = _target_vector(rows, target)
    if np.ptp(y) == 0.0:
        raise DegenerateTargetError(f"target '{target}' has zero variance")
    tolerances = {}
    entered: list[str] = []
    for name in names:
        sel_matrix = np.column_stack([cols[s] for s in entered]) if entered else None
        tolerances[name] = tolerance(cols[name], sel_matrix)
        entered.append(name)
    return _finish(target, mode, list(names), tolerances, cols, y)


def build_report(table: FeatureTable, config: Config = Config()) -> ModelReport:
    """Fit the 4 targets x 2 modes grid; failed cells carry the error
    message while the rest of the grid is still produced."""
    if len(table) < 3:
        raise InsufficientDataError(
            f"need at least 3 rows to fit models, got {len(table)}"
        )
    models: list[FittedModel | FailedFit] = []
    for target in TARGETS:
        for mode in MODES:
            try:
                if mode == "time_only":
                    model = forced_fit(table, target, TIME_ONLY_CANDIDATES, config, mode)
                else:
                    model = stepwise_fit(table, target, BIOMETRIC_CANDIDATES, config, mode)
            except NstLoadError as e:
                models.append(FailedFit(target=target, mode=mode, error=str(e)))
            else:
                models.append(model)
    return ModelReport(models=tuple(models), config=config)


# ---------------------------------------------------------------------------
# Text rendering


def _cell(value: float | None) -> str:
    return "-" if value is None else f"{value:.2f}"


def _grid(title: str, row_labels: list[str], col_labels: list[str],
          cells: list[list[str]], corner: str) -> list[str]:
    widths = [max(len(corner), *(len(r) for r in row_labels))]
    for j, label in enumerate(col_labels):
        widths.append(max(len(label), *(len(row[j]) for row in cells)))
    lines = [title]
    header = [corner.ljust(widths[0])] + [
        label.rjust(widths[j + 1]) for j, label in enumerate(col_labels)
    ]
    lines.append("  ".join(header))
    lines.append("-" * len(lines[-1]))
    for label, row in zip(row_labels, cells):
        rendered = [label.ljust(widths[0])] + [
            cell.rjust(widths[j + 1]) for j, cell in enumerate(row)
        ]
        lines.append("  ".join(rendered))
    return lines


def render_text(report: ModelReport) -> str:
    """Two aligned grids: adjusted R^2 per (mode, target), and standardized
    coefficients of the biometric models per (variable, target)."""
    col_labels = [TARGET_LABELS[t] for t in TARGETS]

    r2_rows = []
    for mode in MODES:
        row = []
        for target in TARGETS:
            m = report.model_for(target, mode)
            if isinstance(m, FittedModel):
                row.append(f"{m.adj_r2:.2f}")
            elif isinstance(m, FailedFit):
                row.append("err")
            else:
                row.append("-")
        r2_rows.append(row)
    lines = _grid(
        "Adjusted R^2 of each model",
        [MODE_LABELS[m] for m in MODES], col_labels, r2_rows, "model",
    )

    lines.append("")
    coef_rows = []
    for name in BIOMETRIC_CANDIDATES:
        row = []
        for target in TARGETS:
            m = report.model_for(target, "biometric_full")
            if isinstance(m, FittedModel):
                row.append(_cell(m.std_coefficients.get(name)))
            elif isinstance(m, FailedFit):
                row.append("err")
            else:
                row.append("-")
        coef_rows.append(row)
    lines.extend(_grid(
        "Standardized partial regression coefficients (biometric full)",
        list(BIOMETRIC_CANDIDATES), col_labels, coef_rows, "variable",
    ))

    lines.append("")
    lines.append('"-" marks a variable not selected into the model.')
    failures = [m for m in report.models if isinstance(m, FailedFit)]
    for f in failures:
        lines.append(f"failed: {f.target}/{f.mode}: {f.error}")
    threshold = report.config.effective_tolerance_threshold
    lines.append(f"tolerance admission threshold: {threshold:g}")
    if report.config.paper_literal_tolerance:
        lines.append(
            "note: the literal threshold 1.0 admits only candidates uncorrelated "
            "with every selected variable, so multi-variable models are unlikely."
        )
    return "\n".join(lines) + "\n"
