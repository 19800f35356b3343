"""Scoring, per-class metrics, the RAG/no-RAG experiment matrix, and
subjective review aggregation.

Precision/recall/F1 are support-weighted averages over the Suitable and
Risky labels; weighted recall therefore equals accuracy by construction.
Predictions of NA where the truth expects a real label count as mismatches;
truth entries of NA are excluded from every metric.
"""
from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable, Mapping, Optional, Sequence

from .domain import (
    ClassMetrics,
    GroundTruthSet,
    InteractionClass,
    Medication,
    PatientProfile,
    ReportStatus,
    ResultLabel,
    SubjectiveReview,
    SuitabilityReport,
    canonical_class_order,
)
from .embedding import EmbeddingProvider
from .errors import RxGuardError
from .gateway import CompletionBackend
from .index import VectorIndex
from .prompting import assemble_prompt, retrieve_context
from .report import RunContext, parse_report
from .smpc import Chunk
from .store import FileStore

logger = logging.getLogger(__name__)


class InvalidReport(RxGuardError):
    """Only Valid reports can be scored."""


class MissingTruth(RxGuardError):
    """Ground truth has no entries for this (patient, medication)."""


class EmptyPairs(RxGuardError):
    """No scorable pairs left after NA exclusion."""


class ScoreOutOfRange(RxGuardError):
    """Subjective review scores must be integers in 1..5."""


class NoReviews(RxGuardError):
    """No reviews in scope for the requested summary."""


class MissingEntity(RxGuardError):
    """Experiment spec references an entity that does not exist."""


@dataclass(frozen=True)
class MatchRecord:
    """One scored (prediction, truth) pair; excluded pairs carry NA truth."""

    interaction_class: InteractionClass
    predicted: ResultLabel
    expected: ResultLabel
    excluded: bool


def score_pair(report: SuitabilityReport, truth: GroundTruthSet) -> list[MatchRecord]:
    """Pair each predicted class label with its ground-truth entry."""
    if report.status != ReportStatus.VALID or report.checks is None:
        raise InvalidReport(f"report {report.id} is not Valid")
    expected_labels = truth.labels_for(report.patient_id, report.medication_id)
    if not expected_labels:
        raise MissingTruth(
            f"no truth entries for ({report.patient_id}, {report.medication_id})"
        )
    records = []
    for cls in canonical_class_order():
        if cls not in expected_labels:
            continue
        expected = expected_labels[cls]
        records.append(
            MatchRecord(
                interaction_class=cls,
                predicted=report.checks[cls].result,
                expected=expected,
                excluded=expected == ResultLabel.NA,
            )
        )
    return records


_SCORED_LABELS = (ResultLabel.SUITABLE, ResultLabel.RISKY)


def compute_metrics(
    interaction_class: InteractionClass,
    pairs: Sequence[tuple[ResultLabel, ResultLabel]],
) -> ClassMetrics:
    """Accuracy plus support-weighted precision/recall/F1 over one class.

    ``pairs`` are (predicted, expected); pairs whose expected label is NA
    are dropped first. Zero-denominator label metrics contribute 0.
    """
    scored = [(p, e) for p, e in pairs if e != ResultLabel.NA]
    if not scored:
        raise EmptyPairs(f"no scorable pairs for {interaction_class.value}")

    total = len(scored)
    matches = sum(1 for p, e in scored if p == e)
    accuracy = matches / total

    weighted_precision = 0.0
    weighted_recall = 0.0
    weighted_f1 = 0.0
    for label in _SCORED_LABELS:
        tp = sum(1 for p, e in scored if p == label and e == label)
        fp = sum(1 for p, e in scored if p == label and e != label)
        support = sum(1 for _, e in scored if e == label)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / support if support else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        weighted_precision += support * precision
        weighted_recall += support * recall
        weighted_f1 += support * f1

    return ClassMetrics(
        interaction_class=interaction_class,
        accuracy=accuracy,
        precision=weighted_precision / total,
        recall=weighted_recall / total,
        f1=weighted_f1 / total,
        support=total,
    )


@dataclass(frozen=True)
class ExperimentSpec:
    model_ids: tuple[str, ...]
    rag_flags: tuple[bool, ...]
    patient_ids: tuple[str, ...]
    medication_ids: tuple[str, ...]
    k: int = 6

    def __post_init__(self) -> None:
        for name in ("model_ids", "rag_flags", "patient_ids", "medication_ids"):
            if not getattr(self, name):
                raise ValueError(f"experiment spec field {name} must be non-empty")

    def to_dict(self) -> dict[str, object]:
        return {
            "model_ids": list(self.model_ids),
            "rag_flags": list(self.rag_flags),
            "patient_ids": list(self.patient_ids),
            "medication_ids": list(self.medication_ids),
            "k": self.k,
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, object]) -> "ExperimentSpec":
        return cls(
            model_ids=tuple(d["model_ids"]),
            rag_flags=tuple(bool(f) for f in d["rag_flags"]),
            patient_ids=tuple(d["patient_ids"]),
            medication_ids=tuple(d["medication_ids"]),
            k=int(d.get("k", 6)),
        )


@dataclass(frozen=True)
class CellFailure:
    model_id: str
    rag_enabled: bool
    patient_id: str
    medication_id: str
    error: str


@dataclass
class MetricsTable:
    """Per-(model, rag, class) metrics plus per-cell bookkeeping."""

    model_ids: tuple[str, ...]
    rag_flags: tuple[bool, ...]
    rows: dict[tuple[str, bool, InteractionClass], ClassMetrics] = field(default_factory=dict)
    invalid_counts: dict[tuple[str, bool], int] = field(default_factory=dict)
    valid_counts: dict[tuple[str, bool], int] = field(default_factory=dict)
    failures: list[CellFailure] = field(default_factory=list)

    def empty_cells(self) -> list[tuple[str, bool]]:
        """Cells that produced zero valid reports."""
        return [
            (model, rag)
            for model in self.model_ids
            for rag in self.rag_flags
            if self.valid_counts.get((model, rag), 0) == 0
        ]

    def slice(
        self, model_id: Optional[str] = None, rag: Optional[bool] = None
    ) -> list[dict[str, object]]:
        out = []
        for model in self.model_ids:
            if model_id is not None and model != model_id:
                continue
            for flag in self.rag_flags:
                if rag is not None and flag != rag:
                    continue
                for cls in canonical_class_order():
                    metrics = self.rows.get((model, flag, cls))
                    if metrics is None:
                        continue
                    out.append(
                        {
                            "model": model,
                            "rag": flag,
                            "class": cls.value,
                            "accuracy": metrics.accuracy,
                            "precision": metrics.precision,
                            "recall": metrics.recall,
                            "f1": metrics.f1,
                            "support": metrics.support,
                            "invalid_count": self.invalid_counts.get((model, flag), 0),
                        }
                    )
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(
            ["model", "rag", "class", "accuracy", "precision", "recall", "f1", "support", "invalid_count"]
        )
        for row in self.slice():
            writer.writerow(
                [
                    row["model"],
                    "true" if row["rag"] else "false",
                    row["class"],
                    f"{row['accuracy']:.12g}",
                    f"{row['precision']:.12g}",
                    f"{row['recall']:.12g}",
                    f"{row['f1']:.12g}",
                    row["support"],
                    row["invalid_count"],
                ]
            )
        return buf.getvalue()


@dataclass
class ExperimentResult:
    table: MetricsTable
    reports: list[SuitabilityReport]


def _utc_now() -> datetime:
    return datetime.now(timezone.utc).replace(tzinfo=None)


def run_experiment(
    spec: ExperimentSpec,
    *,
    profiles: Mapping[str, PatientProfile],
    medications: Mapping[str, Medication],
    truth: GroundTruthSet,
    backends: Mapping[str, CompletionBackend],
    index: Optional[VectorIndex],
    provider: Optional[EmbeddingProvider],
    chunks_by_id: Mapping[str, Chunk],
    archive: Optional[Callable[[SuitabilityReport], None]] = None,
    clock: Callable[[], datetime] = _utc_now,
) -> ExperimentResult:
    """Run the full (model x rag x patient x medication) cross-product.

    Invalid reports are archived and counted per cell but excluded from
    metric denominators. Gateway failures are recorded per cell and never
    abort the rest of the run.
    """
    _check_spec_entities(spec, profiles, medications, backends)
    table = MetricsTable(model_ids=spec.model_ids, rag_flags=spec.rag_flags)
    reports: list[SuitabilityReport] = []

    for model_id in spec.model_ids:
        backend = backends[model_id]
        for rag in spec.rag_flags:
            cell = (model_id, rag)
            table.invalid_counts[cell] = 0
            table.valid_counts[cell] = 0
            pairs: dict[InteractionClass, list[tuple[ResultLabel, ResultLabel]]] = {
                cls: [] for cls in canonical_class_order()
            }
            for patient_id in spec.patient_ids:
                for medication_id in spec.medication_ids:
                    try:
                        report = run_assessment(
                            profiles[patient_id],
                            medications[medication_id],
                            model_id,
                            rag,
                            backend,
                            index=index,
                            provider=provider,
                            chunks_by_id=chunks_by_id,
                            k=spec.k,
                            clock=clock,
                        )
                    except RxGuardError as exc:
                        logger.warning(
                            "cell (%s, rag=%s) pair (%s, %s) failed: %s",
                            model_id, rag, patient_id, medication_id, exc,
                        )
                        table.failures.append(
                            CellFailure(model_id, rag, patient_id, medication_id, str(exc))
                        )
                        continue
                    reports.append(report)
                    if archive is not None:
                        archive(report)
                    if report.status != ReportStatus.VALID:
                        table.invalid_counts[cell] += 1
                        continue
                    table.valid_counts[cell] += 1
                    for record in score_pair(report, truth):
                        if record.excluded:
                            continue
                        pairs[record.interaction_class].append(
                            (record.predicted, record.expected)
                        )
            for cls, class_pairs in pairs.items():
                if class_pairs:
                    table.rows[(model_id, rag, cls)] = compute_metrics(cls, class_pairs)

    for model_id, rag in table.empty_cells():
        logger.warning("cell (%s, rag=%s) produced no valid reports", model_id, rag)
    return ExperimentResult(table=table, reports=reports)


def run_assessment(
    profile: PatientProfile,
    medication: Medication,
    model_id: str,
    rag: bool,
    backend: CompletionBackend,
    *,
    index: Optional[VectorIndex],
    provider: Optional[EmbeddingProvider],
    chunks_by_id: Mapping[str, Chunk],
    k: int = 6,
    clock: Callable[[], datetime] = _utc_now,
    report_id: Optional[str] = None,
) -> SuitabilityReport:
    """One complete assessment: retrieve (when RAG), prompt, complete, parse."""
    context = None
    if rag:
        if index is None or provider is None:
            raise MissingEntity("RAG runs need a vector index and an embedding provider")
        context = retrieve_context(
            profile, medication, index=index, provider=provider, chunks_by_id=chunks_by_id, k=k
        )
    prompt = assemble_prompt(profile, medication, context)
    raw, _record = backend.complete(prompt)
    rag_tag = "rag" if rag else "norag"
    ctx = RunContext(
        report_id=report_id or f"{model_id}_{rag_tag}_{profile.id}_{medication.id}",
        patient_id=profile.id,
        medication_id=medication.id,
        model_id=model_id,
        rag_enabled=rag,
        retrieved_chunk_ids=context.chunk_ids() if context is not None else (),
        created_at=clock(),
    )
    return parse_report(raw, ctx)


def _check_spec_entities(
    spec: ExperimentSpec,
    profiles: Mapping[str, PatientProfile],
    medications: Mapping[str, Medication],
    backends: Mapping[str, CompletionBackend],
) -> None:
    for pid in spec.patient_ids:
        if pid not in profiles:
            raise MissingEntity(f"unknown patient {pid!r} in experiment spec")
    for mid in spec.medication_ids:
        if mid not in medications:
            raise MissingEntity(f"unknown medication {mid!r} in experiment spec")
    for model_id in spec.model_ids:
        if model_id not in backends:
            raise MissingEntity(f"no backend configured for model {model_id!r}")


# -- subjective reviews ------------------------------------------------------


@dataclass(frozen=True)
class ReviewMeans:
    model_id: str
    rag_enabled: bool
    msa: float
    did: float
    psda: float
    pss: float
    ga: float
    overall: float
    review_count: int

    def to_dict(self) -> dict[str, object]:
        return {
            "model": self.model_id,
            "rag": self.rag_enabled,
            "msa": self.msa,
            "did": self.did,
            "psda": self.psda,
            "pss": self.pss,
            "ga": self.ga,
            "overall": self.overall,
            "review_count": self.review_count,
        }


@dataclass(frozen=True)
class ReviewSummary:
    cells: tuple[ReviewMeans, ...]


def record_review(store: FileStore, review: SubjectiveReview) -> str:
    """Validate score bounds and upsert; duplicates replace with a warning."""
    for name, value in review.scores().items():
        if not isinstance(value, int) or isinstance(value, bool) or not 1 <= value <= 5:
            raise ScoreOutOfRange(f"{name} must be an integer in 1..5, got {value!r}")
    review_id = store.review_id(review)
    if review_id in store.list_reviews():
        logger.warning("replacing existing review %s", review_id)
    store.put_review(review)
    return review_id


def summarize_reviews(
    reviews: Sequence[SubjectiveReview],
    model_id: Optional[str] = None,
    rag: Optional[bool] = None,
) -> ReviewSummary:
    """Arithmetic means per metric and overall, per (model, rag) cell."""
    in_scope = [
        r
        for r in reviews
        if (model_id is None or r.model_id == model_id)
        and (rag is None or r.rag_enabled == rag)
    ]
    if not in_scope:
        raise NoReviews("no reviews in scope")
    grouped: dict[tuple[str, bool], list[SubjectiveReview]] = {}
    for review in in_scope:
        grouped.setdefault((review.model_id, review.rag_enabled), []).append(review)

    cells = []
    for (model, flag) in sorted(grouped, key=lambda key: (key[0], key[1])):
        group = grouped[(model, flag)]
        means = {
            name: sum(getattr(r, name) for r in group) / len(group)
            for name in ("msa", "did", "psda", "pss", "ga")
        }
        overall = sum(means.values()) / len(means)
        cells.append(
            ReviewMeans(
                model_id=model,
                rag_enabled=flag,
                overall=overall,
                review_count=len(group),
                **means,
            )
        )
    return ReviewSummary(cells=tuple(cells))


def reviews_to_csv(reviews: Sequence[SubjectiveReview]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["reviewer_id", "patient_id", "model", "rag", "msa", "did", "psda", "pss", "ga", "notes"]
    )
    ordered = sorted(
        reviews, key=lambda r: (r.reviewer_id, r.patient_id, r.model_id, r.rag_enabled)
    )
    for r in ordered:
        writer.writerow(
            [
                r.reviewer_id,
                r.patient_id,
                r.model_id,
                "true" if r.rag_enabled else "false",
                r.msa,
                r.did,
                r.psda,
                r.pss,
                r.ga,
                r.notes or "",
            ]
        )
    return buf.getvalue()


def review_summary_to_csv(summary: ReviewSummary) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["model", "rag", "msa", "did", "psda", "pss", "ga", "overall", "review_count"])
    for cell in summary.cells:
        writer.writerow(
            [
                cell.model_id,
                "true" if cell.rag_enabled else "false",
                f"{cell.msa:.12g}",
                f"{cell.did:.12g}",
                f"{cell.psda:.12g}",
                f"{cell.pss:.12g}",
                f"{cell.ga:.12g}",
                f"{cell.overall:.12g}",
                cell.review_count,
            ]
        )
    return buf.getvalue()
