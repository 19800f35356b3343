"""HTTP API consumed by the clinician console.

Assessments run asynchronously on a bounded worker pool and are polled by
job id; everything else is synchronous. Error responses always carry a
structured body {code, message, details}. When RXGUARD_API_TOKEN is set,
every request must present it as a bearer token.
"""
from __future__ import annotations

import logging
import os
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import evaluation
from .config import AppConfig
from .domain import (
    Medication,
    PatientProfile,
    SubjectiveReview,
    SuitabilityReport,
    validate_profile,
    validate_report,
)
from .errors import RxGuardError
from .gateway import CompletionBackend
from .index import VectorIndex, cosine_similarity
from .prompting import build_query
from .store import FileStore, NotFound

logger = logging.getLogger(__name__)


class JobState(str, Enum):
    PENDING = "Pending"
    RUNNING = "Running"
    DONE = "Done"
    FAILED = "Failed"


@dataclass
class AssessmentJob:
    job_id: str
    patient_id: str
    medication_id: str
    model_id: str
    rag_enabled: bool
    state: JobState = JobState.PENDING
    report_id: Optional[str] = None
    error: Optional[str] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "job_id": self.job_id,
            "patient_id": self.patient_id,
            "medication_id": self.medication_id,
            "model_id": self.model_id,
            "rag_enabled": self.rag_enabled,
            "state": self.state.value,
            "report_id": self.report_id,
            "error": self.error,
        }


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, details: Any = None) -> None:
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.details = details


class AssessmentRequest(BaseModel):
    patient_id: str
    medication_id: str
    model_id: str
    rag: bool = False


@dataclass
class ServiceState:
    store: FileStore
    config: AppConfig
    backends: dict[str, CompletionBackend]
    provider: Any
    index: Optional[VectorIndex]
    chunks_by_id: dict[str, Any]
    jobs: dict[str, AssessmentJob] = field(default_factory=dict)
    jobs_lock: threading.Lock = field(default_factory=threading.Lock)
    executor: ThreadPoolExecutor = field(default_factory=lambda: ThreadPoolExecutor(max_workers=4))

    def medications(self) -> dict[str, Medication]:
        catalog = {}
        for doc_id in self.store.list_documents():
            doc = self.store.get_document(doc_id)
            catalog[doc_id] = Medication(id=doc_id, name=doc.medication_name, smpc_doc_id=doc_id)
        return catalog


def _now() -> datetime:
    return datetime.now(timezone.utc).replace(tzinfo=None)


def create_app(store: FileStore, config: AppConfig) -> FastAPI:
    state = ServiceState(
        store=store,
        config=config,
        backends=config.build_backends(),
        provider=config.build_provider(),
        index=_load_index(store),
        chunks_by_id=store.all_chunks_by_id(),
    )
    app = FastAPI(title="rxguard", version="0.1.0")
    app.state.rxguard = state

    from fastapi.middleware.cors import CORSMiddleware

    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ApiError)
    async def handle_api_error(_req: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "message": exc.message, "details": exc.details},
        )

    @app.exception_handler(RequestValidationError)
    async def handle_body_error(_req: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(
            status_code=422,
            content={
                "code": "ValidationFailed",
                "message": "request body failed validation",
                "details": exc.errors(),
            },
        )

    @app.exception_handler(RxGuardError)
    async def handle_domain_error(_req: Request, exc: RxGuardError) -> JSONResponse:
        return JSONResponse(
            status_code=500,
            content={"code": exc.code, "message": str(exc), "details": None},
        )

    @app.middleware("http")
    async def check_token(request: Request, call_next):
        token = os.environ.get("RXGUARD_API_TOKEN")
        if token:
            supplied = request.headers.get("Authorization", "")
            if supplied != f"Bearer {token}":
                return JSONResponse(
                    status_code=401,
                    content={"code": "AuthFailure", "message": "invalid API token", "details": None},
                )
        return await call_next(request)

    _register_routes(app, state)
    return app


def _load_index(store: FileStore) -> Optional[VectorIndex]:
    if store.vectors_manifest_path.exists() and store.vectors_bin_path.exists():
        return VectorIndex.load(store.vectors_bin_path, store.vectors_manifest_path)
    return None


def _register_routes(app: FastAPI, state: ServiceState) -> None:
    @app.post("/patients", status_code=201)
    def create_patient(body: dict):
        profile = PatientProfile.from_dict(body)
        if not profile.id:
            raise ApiError(422, "ValidationFailed", "profile must carry a non-empty id")
        violations = validate_profile(profile)
        if violations:
            raise ApiError(
                422,
                "ValidationFailed",
                "profile violates invariants",
                [v.to_dict() for v in violations],
            )
        state.store.put_profile(profile)
        return {"id": profile.id}

    @app.get("/patients")
    def list_patients():
        return {"patients": [state.store.get_profile(pid).to_dict() for pid in state.store.list_profiles()]}

    @app.get("/patients/{patient_id}")
    def get_patient(patient_id: str):
        return _get_profile(state, patient_id).to_dict()

    @app.put("/patients/{patient_id}")
    def update_patient(patient_id: str, body: dict):
        _get_profile(state, patient_id)  # 404 when absent
        merged = dict(body)
        merged["id"] = patient_id
        profile = PatientProfile.from_dict(merged)
        violations = validate_profile(profile)
        if violations:
            raise ApiError(
                422,
                "ValidationFailed",
                "profile violates invariants",
                [v.to_dict() for v in violations],
            )
        state.store.put_profile(profile)
        return profile.to_dict()

    @app.post("/patients/{patient_id}/verify")
    def verify_patient(patient_id: str):
        profile = _get_profile(state, patient_id)
        verified = profile.verify()
        state.store.put_profile(verified)
        return verified.to_dict()

    @app.get("/models")
    def list_models():
        return {
            "models": [
                {"id": model_id, "kind": model.kind}
                for model_id, model in sorted(state.config.models.items())
            ]
        }

    @app.get("/medications")
    def list_medications():
        catalog = state.medications()
        items = []
        for med_id in sorted(catalog):
            med = catalog[med_id]
            indexed = (
                state.index is not None and state.index.medication_count(med_id) > 0
            )
            items.append(
                {
                    "id": med.id,
                    "name": med.name,
                    "smpc_doc_id": med.smpc_doc_id,
                    "smpc_available": True,
                    "indexed": indexed,
                }
            )
        return {"medications": items}

    @app.post("/assessments", status_code=202)
    def create_assessment(body: AssessmentRequest):
        profile = _get_profile(state, body.patient_id)
        catalog = state.medications()
        medication = catalog.get(body.medication_id)
        if medication is None:
            raise ApiError(404, "NotFound", f"unknown medication {body.medication_id!r}")
        backend = state.backends.get(body.model_id)
        if backend is None:
            raise ApiError(404, "NotFound", f"no backend configured for model {body.model_id!r}")

        job = AssessmentJob(
            job_id=uuid.uuid4().hex,
            patient_id=profile.id,
            medication_id=medication.id,
            model_id=body.model_id,
            rag_enabled=body.rag,
        )
        with state.jobs_lock:
            state.jobs[job.job_id] = job
        state.executor.submit(_execute_job, state, job.job_id)
        return {"job_id": job.job_id}

    @app.get("/assessments/{job_id}")
    def get_assessment(job_id: str):
        with state.jobs_lock:
            job = state.jobs.get(job_id)
        if job is None:
            raise ApiError(404, "NotFound", f"unknown job {job_id!r}")
        payload = job.to_dict()
        if job.state == JobState.DONE and job.report_id:
            report = state.store.get_report(job.report_id)
            if validate_report(report):
                raise ApiError(500, "InvariantViolation", "stored report failed validation")
            payload["report"] = report.to_dict()
            payload["retrieved_chunks"] = _resolve_chunks(state, report)
        return payload

    @app.post("/reviews", status_code=201)
    def create_review(body: dict):
        data = dict(body)
        data.setdefault("created_at", _now().isoformat())
        try:
            review = SubjectiveReview.from_dict(data)
        except (KeyError, TypeError) as exc:
            raise ApiError(422, "ValidationFailed", f"review body incomplete: {exc}")
        try:
            review_id = evaluation.record_review(state.store, review)
        except evaluation.ScoreOutOfRange as exc:
            raise ApiError(422, "ScoreOutOfRange", str(exc))
        return {"id": review_id}

    @app.get("/reviews")
    def list_reviews():
        return {"reviews": [r.to_dict() for r in state.store.all_reviews()]}

    @app.get("/reviews/summary")
    def review_summary(model: Optional[str] = None, rag: Optional[bool] = None):
        try:
            summary = evaluation.summarize_reviews(state.store.all_reviews(), model, rag)
        except evaluation.NoReviews:
            return {"cells": []}
        return {"cells": [cell.to_dict() for cell in summary.cells]}

    @app.get("/metrics")
    def metrics(model: Optional[str] = None, rag: Optional[bool] = None):
        table = _metrics_from_archive(state, model, rag)
        if table is None:
            return {"rows": [], "invalid_counts": {}}
        rows = table.slice(model, rag)
        return {
            "rows": rows,
            "invalid_counts": {
                f"{m}|{'rag' if r else 'norag'}": count
                for (m, r), count in sorted(table.invalid_counts.items())
            },
        }


def _metrics_from_archive(
    state: ServiceState, model: Optional[str], rag: Optional[bool]
) -> Optional[evaluation.MetricsTable]:
    """Recompute the metrics table from archived reports and stored truth."""
    from .domain import GroundTruthSet, InteractionClass, ReportStatus, ResultLabel

    entries: dict = {}
    for truth_id in state.store.list_truth():
        entries.update(state.store.get_truth(truth_id).entries)
    truth = GroundTruthSet(entries=entries)

    reports = [state.store.get_report(rid) for rid in state.store.list_reports()]
    reports = [
        r
        for r in reports
        if (model is None or r.model_id == model) and (rag is None or r.rag_enabled == rag)
    ]
    if not reports:
        return None

    model_ids = tuple(sorted({r.model_id for r in reports}))
    rag_flags = tuple(sorted({r.rag_enabled for r in reports}))
    table = evaluation.MetricsTable(model_ids=model_ids, rag_flags=rag_flags)
    pairs: dict[tuple[str, bool, InteractionClass], list[tuple[ResultLabel, ResultLabel]]] = {}
    for report in reports:
        cell = (report.model_id, report.rag_enabled)
        if report.status != ReportStatus.VALID:
            table.invalid_counts[cell] = table.invalid_counts.get(cell, 0) + 1
            continue
        table.valid_counts[cell] = table.valid_counts.get(cell, 0) + 1
        if not truth.entries:
            continue
        try:
            records = evaluation.score_pair(report, truth)
        except evaluation.MissingTruth:
            continue
        for record in records:
            if record.excluded:
                continue
            pairs.setdefault((*cell, record.interaction_class), []).append(
                (record.predicted, record.expected)
            )
    for (model_id, flag, cls), class_pairs in pairs.items():
        table.rows[(model_id, flag, cls)] = evaluation.compute_metrics(cls, class_pairs)
    return table


def _get_profile(state: ServiceState, patient_id: str) -> PatientProfile:
    try:
        return state.store.get_profile(patient_id)
    except NotFound:
        raise ApiError(404, "NotFound", f"unknown patient {patient_id!r}")


def _execute_job(state: ServiceState, job_id: str) -> None:
    with state.jobs_lock:
        job = state.jobs[job_id]
        job.state = JobState.RUNNING
    try:
        profile = state.store.get_profile(job.patient_id)
        medication = state.medications()[job.medication_id]
        backend = state.backends[job.model_id]
        report = evaluation.run_assessment(
            profile,
            medication,
            job.model_id,
            job.rag_enabled,
            backend,
            index=state.index,
            provider=state.provider,
            chunks_by_id=state.chunks_by_id,
            k=state.config.retrieval_k,
            report_id=f"job_{job.job_id}",
        )
        state.store.put_report(report)
        with state.jobs_lock:
            job.state = JobState.DONE
            job.report_id = report.id
    except Exception as exc:  # noqa: BLE001 - job surface must capture any failure
        logger.exception("assessment job %s failed", job_id)
        code = exc.code if isinstance(exc, RxGuardError) else type(exc).__name__
        with state.jobs_lock:
            job.state = JobState.FAILED
            job.error = f"{code}: {exc}"


def _resolve_chunks(state: ServiceState, report: SuitabilityReport) -> list[dict[str, Any]]:
    """Chunk texts plus recomputed query similarity for the context drawer."""
    if not report.retrieved_chunk_ids:
        return []
    query_vec = None
    if state.index is not None:
        try:
            profile = state.store.get_profile(report.patient_id)
            medication = state.medications()[report.medication_id]
            query_vec = state.provider.embed_text(build_query(profile, medication))
        except (RxGuardError, KeyError):
            query_vec = None
    resolved = []
    for chunk_id in report.retrieved_chunk_ids:
        chunk = state.chunks_by_id.get(chunk_id)
        entry: dict[str, Any] = {
            "chunk_id": chunk_id,
            "section": chunk.section.value if chunk else None,
            "text": chunk.text if chunk else None,
            "similarity": None,
        }
        if query_vec is not None and state.index is not None:
            stored = state.index.vector(chunk_id)
            if stored is not None:
                entry["similarity"] = cosine_similarity(stored, query_vec)
        resolved.append(entry)
    return resolved
