"""HTTP service exposing the pipeline: validate, metrics, features,
fit, report rendering, and synthetic study generation."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import DataValidationError, NstLoadError, StudyValidationError
from ..features import (
    build_features,
    feature_table_csv,
    records_from_study,
    study_metrics,
    validate_study,
)
from ..regress import build_report, render_text, report_from_dict
from ..synth import StudyConfig, relations_from_dict, study_files
from .schemas import (
    FeatureRowModel,
    FeaturesResponse,
    FitResponse,
    HealthResponse,
    MetricsResponse,
    MetricsRow,
    ProblemModel,
    ReportRequest,
    ReportResponse,
    StudyRequest,
    SynthRequest,
    SynthResponse,
    ValidateResponse,
)


def create_app() -> FastAPI:
    app = FastAPI(
        title="nstload",
        version=__version__,
        description=(
            "Estimates cognitive load from nasal and forehead skin "
            "temperature recordings: windowed NST metrics, feature "
            "assembly against NASA-TLX subscales, and stepwise OLS."
        ),
    )

    @app.exception_handler(NstLoadError)
    async def _domain_error(request: Request, exc: NstLoadError):
        body: dict = {"detail": str(exc)}
        if isinstance(exc, StudyValidationError):
            body["problems"] = [
                {"location": p.location, "message": p.message} for p in exc.problems
            ]
        return JSONResponse(status_code=400, content=body)

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(version=__version__)

    @app.post("/validate", response_model=ValidateResponse)
    def validate(req: StudyRequest) -> ValidateResponse:
        config = req.config.to_config()
        problems = validate_study(req.study.model_dump(), config)
        return ValidateResponse(
            valid=not problems,
            problems=[ProblemModel(location=p.location, message=p.message) for p in problems],
        )

    @app.post("/metrics", response_model=MetricsResponse)
    def metrics(req: StudyRequest) -> MetricsResponse:
        config = req.config.to_config()
        records = records_from_study(req.study.model_dump(), config)
        rows = []
        for sm in study_metrics(records, config):
            rows.append(MetricsRow(
                subject_id=sm.subject_id,
                task_id=sm.task_id,
                rest_nst_c=sm.rest_nst_c,
                n_windows=sm.metrics.n_windows,
                wmax=sm.metrics.wmax,
                wave=sm.metrics.wave,
                wsum=sm.metrics.wsum,
                wnst=list(sm.wnst.wnst_values()),
            ))
        return MetricsResponse(rows=rows)

    @app.post("/features", response_model=FeaturesResponse)
    def features(req: StudyRequest) -> FeaturesResponse:
        config = req.config.to_config()
        records = records_from_study(req.study.model_dump(), config)
        table = build_features(records, config)
        rows = [
            FeatureRowModel(
                subject_id=row.subject_id,
                task_id=row.task_id,
                wmax=row.wmax,
                wave=row.wave,
                wsum=row.wsum,
                log_time=row.log_time,
                **row.tlx.as_dict(),
            )
            for row in table.rows
        ]
        return FeaturesResponse(rows=rows, csv=feature_table_csv(table))

    @app.post("/fit", response_model=FitResponse)
    def fit(req: StudyRequest) -> FitResponse:
        config = req.config.to_config()
        records = records_from_study(req.study.model_dump(), config)
        table = build_features(records, config)
        report = build_report(table, config)
        return FitResponse(report=report.to_dict(), text=render_text(report))

    @app.post("/report", response_model=ReportResponse)
    def report(req: ReportRequest) -> ReportResponse:
        try:
            parsed = report_from_dict(req.report)
        except (KeyError, TypeError, ValueError) as e:
            raise DataValidationError(f"malformed report document: {e}") from None
        return ReportResponse(text=render_text(parsed))

    @app.post("/synth", response_model=SynthResponse)
    def synth(req: SynthRequest) -> SynthResponse:
        kwargs: dict = {
            "n_subjects": req.subjects,
            "tasks_per_subject": req.tasks,
            "seed": req.seed,
        }
        if req.relations is not None:
            kwargs["relations"] = relations_from_dict(req.relations)
        files, _ = study_files(StudyConfig(**kwargs))
        return SynthResponse(files=files, n_sessions=req.subjects * req.tasks)

    return app


app = create_app()
