"""Cognitive-load estimation from nasal/forehead skin temperature.

Pipeline: windowed NST metrics (wmax, wave, wsum) per task, feature
assembly against NASA-TLX subscales and log task time, then OLS with
stepwise selection and tolerance screening, reported as adjusted R^2
and standardized partial regression coefficient tables.
"""

__version__ = "0.1.0"

from .config import Config
from .errors import (
    DataValidationError,
    DegenerateTargetError,
    EmptyIntervalError,
    EmptySeriesError,
    InsufficientDataError,
    InvalidSampleError,
    NstLoadError,
    Problem,
    SingularDesignError,
    StudyValidationError,
    UndefinedAdjustmentError,
    WindowGapError,
)
from .features import (
    FeatureRow,
    FeatureTable,
    TaskRecord,
    TlxResponse,
    build_features,
    compute_session_metrics,
    feature_table_csv,
    load_manifest,
    read_study_file,
    records_from_study,
    study_metrics,
    validate_study,
)
from .metrics import MetricSet, WnstSeries, summarize, wnst_series
from .regress import (
    FittedModel,
    ModelReport,
    OlsFit,
    adjusted_r2,
    build_report,
    fit_ols,
    forced_fit,
    render_text,
    report_from_dict,
    report_from_json,
    standardized_coefficients,
    stepwise_fit,
    tolerance,
)
from .signal import (
    NstSeries,
    SessionRecording,
    TemperatureSample,
    nst,
    read_samples_csv,
    rest_baseline,
    window_nst,
    write_samples_csv,
)
from .synth import (
    GroundTruth,
    LoadProfile,
    Phase,
    SessionTruth,
    StudyConfig,
    TargetRelation,
    default_relations,
    generate_records,
    generate_session,
    generate_study,
    relations_from_dict,
    study_files,
)

__all__ = [
    "Config",
    "DataValidationError",
    "DegenerateTargetError",
    "EmptyIntervalError",
    "EmptySeriesError",
    "FeatureRow",
    "FeatureTable",
    "FittedModel",
    "GroundTruth",
    "InsufficientDataError",
    "InvalidSampleError",
    "LoadProfile",
    "MetricSet",
    "ModelReport",
    "NstLoadError",
    "NstSeries",
    "OlsFit",
    "Phase",
    "Problem",
    "SessionRecording",
    "SessionTruth",
    "SingularDesignError",
    "StudyConfig",
    "StudyValidationError",
    "TargetRelation",
    "TaskRecord",
    "TemperatureSample",
    "TlxResponse",
    "UndefinedAdjustmentError",
    "WindowGapError",
    "WnstSeries",
    "adjusted_r2",
    "build_features",
    "build_report",
    "compute_session_metrics",
    "default_relations",
    "feature_table_csv",
    "fit_ols",
    "forced_fit",
    "generate_records",
    "generate_session",
    "generate_study",
    "load_manifest",
    "nst",
    "read_samples_csv",
    "read_study_file",
    "records_from_study",
    "relations_from_dict",
    "render_text",
    "report_from_dict",
    "report_from_json",
    "rest_baseline",
    "standardized_coefficients",
    "stepwise_fit",
    "study_files",
    "study_metrics",
    "summarize",
    "tolerance",
    "validate_study",
    "window_nst",
    "wnst_series",
    "write_samples_csv",
]
