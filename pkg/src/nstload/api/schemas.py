"""Request and response models for the HTTP service.

Requests carry a resolved study document: the manifest fields with each
session's samples inlined as (time_s, forehead_c, nasal_c) triples, so
the service never touches the client's filesystem. Session contents are
validated by the domain layer, which reports findings per location
instead of rejecting the envelope.
"""

from __future__ import annotations

from pydantic import BaseModel

from ..config import Config


class ConfigPayload(BaseModel):
    window_len_s: float = 120.0
    rest_agg: str = "mean"
    tolerance_threshold: float = 0.1
    paper_literal_tolerance: bool = False
    selection: str = "forward"
    min_improvement: float = 0.0
    temp_band: tuple[float, float] = (20.0, 45.0)
    output_format: str = "text"

    def to_config(self) -> Config:
        data = self.model_dump()
        data["temp_band"] = tuple(data["temp_band"])
        return Config(**data)


class StudyDocument(BaseModel):
    sessions: list[dict]


class StudyRequest(BaseModel):
    study: StudyDocument
    config: ConfigPayload = ConfigPayload()


class HealthResponse(BaseModel):
    status: str = "ok"
    version: str


class ProblemModel(BaseModel):
    location: str
    message: str


class ValidateResponse(BaseModel):
    valid: bool
    problems: list[ProblemModel]


class MetricsRow(BaseModel):
    subject_id: str
    task_id: str
    rest_nst_c: float
    n_windows: int
    wmax: float
    wave: float
    wsum: float
    wnst: list[float]


class MetricsResponse(BaseModel):
    rows: list[MetricsRow]


class FeatureRowModel(BaseModel):
    subject_id: str
    task_id: str
    wmax: float
    wave: float
    wsum: float
    log_time: float
    mental_demand: float
    own_performance: float
    effort: float
    frustration: float


class FeaturesResponse(BaseModel):
    rows: list[FeatureRowModel]
    csv: str


class FitResponse(BaseModel):
    report: dict
    text: str


class ReportRequest(BaseModel):
    report: dict


class ReportResponse(BaseModel):
    text: str


class SynthRequest(BaseModel):
    subjects: int = 7
    tasks: int = 2
    seed: int = 42
    relations: dict | None = None


class SynthResponse(BaseModel):
    files: dict[str, str]
    n_sessions: int
    manifest: str = "manifest.json"
