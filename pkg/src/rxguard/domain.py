"""Shared domain types and their invariants. No I/O lives here.

All types are immutable value objects; instances can be shared freely
between threads. Validation never raises on bad data: violations are
returned as values so callers (service, CLI, review UI) can surface every
problem at once.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import date, datetime
from enum import Enum
from typing import Any, Iterable, Mapping, Optional


class Gender(str, Enum):
    MALE = "male"
    FEMALE = "female"


class Urgency(str, Enum):
    ELECTIVE = "elective"
    URGENT = "urgent"
    EMERGENCY = "emergency"


class PregnancyStatus(str, Enum):
    PREGNANT = "pregnant"
    NOT_PREGNANT = "not_pregnant"
    UNKNOWN = "unknown"


class LactationStatus(str, Enum):
    LACTATING = "lactating"
    NOT_LACTATING = "not_lactating"
    UNKNOWN = "unknown"


class InteractionClass(str, Enum):
    """The eight suitability dimensions checked per prescription.

    Definition order is the canonical order used everywhere internally.
    """

    AGE = "Age"
    COMORBIDITIES = "Comorbidities"
    CONTRAINDICATIONS = "Contraindications"
    DOSE = "Dose"
    GENETICS = "Genetics"
    LACTATION = "Lactation"
    PREGNANCY = "Pregnancy"
    WARNINGS = "Warnings"


class ResultLabel(str, Enum):
    SUITABLE = "Suitable"
    RISKY = "Risky"
    NA = "NA"


class ReportStatus(str, Enum):
    VALID = "Valid"
    INVALID = "Invalid"


# Accepted spellings for the not-applicable label, compared casefolded.
_NA_VARIANTS = frozenset({"n/a", "na", "not applicable"})


def canonical_class_order() -> list[InteractionClass]:
    """The eight interaction classes in their fixed canonical order."""
    return list(InteractionClass)


def normalize_result_label(raw: str) -> Optional[ResultLabel]:
    """Map a model-emitted result string onto a :class:`ResultLabel`.

    Case-insensitive; surrounding whitespace ignored; the usual N/A
    spellings all normalize to ``NA``. Returns None for anything else.
    """
    token = raw.strip().casefold()
    if token == "suitable":
        return ResultLabel.SUITABLE
    if token == "risky":
        return ResultLabel.RISKY
    if token in _NA_VARIANTS:
        return ResultLabel.NA
    return None


def _iso(value: Any) -> Any:
    if isinstance(value, (date, datetime)):
        return value.isoformat()
    return value


def _parse_date(value: Any) -> Any:
    if isinstance(value, str):
        try:
            return date.fromisoformat(value)
        except ValueError:
            return value
    return value


def _parse_datetime(value: Any) -> Any:
    if isinstance(value, str):
        try:
            return datetime.fromisoformat(value)
        except ValueError:
            return value
    return value


def _parse_enum(enum_cls: type[Enum], value: Any) -> Any:
    # Keep unrecognized raw values so validate_profile can report them.
    try:
        return enum_cls(value)
    except ValueError:
        return value


def _parse_decimal(value: Any) -> Any:
    """Normalize JSON numbers to float so 10 and 10.0 decode identically
    (clients serialize whole floats without the fraction); non-numbers pass
    through for validation to flag."""
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, float)):
        return float(value)
    return value


@dataclass(frozen=True)
class Diagnosis:
    code: str
    label: str

    def to_dict(self) -> dict[str, Any]:
        return {"code": self.code, "label": self.label}

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "Diagnosis":
        return cls(code=d.get("code", ""), label=d.get("label", ""))


@dataclass(frozen=True)
class Measurement:
    """A lab result or vital sign reading."""

    name: str
    value: float
    unit: str
    taken_at: datetime

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "value": self.value,
            "unit": self.unit,
            "taken_at": _iso(self.taken_at),
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "Measurement":
        return cls(
            name=d.get("name", ""),
            value=_parse_decimal(d.get("value", 0.0)),
            unit=d.get("unit", ""),
            taken_at=_parse_datetime(d.get("taken_at")),
        )


@dataclass(frozen=True)
class MedicationCourse:
    drug_name: str
    dose_value: float
    dose_unit: str
    schedule: str
    start: date
    end: Optional[date] = None

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "drug_name": self.drug_name,
            "dose_value": self.dose_value,
            "dose_unit": self.dose_unit,
            "schedule": self.schedule,
            "start": _iso(self.start),
        }
        if self.end is not None:
            d["end"] = _iso(self.end)
        return d

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "MedicationCourse":
        end = d.get("end")
        return cls(
            drug_name=d.get("drug_name", ""),
            dose_value=_parse_decimal(d.get("dose_value", 0.0)),
            dose_unit=d.get("dose_unit", ""),
            schedule=d.get("schedule", ""),
            start=_parse_date(d.get("start")),
            end=_parse_date(end) if end is not None else None,
        )


@dataclass(frozen=True)
class Admission:
    urgency: Urgency
    admitted_at: datetime
    discharged_at: Optional[datetime] = None

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "urgency": self.urgency.value if isinstance(self.urgency, Urgency) else self.urgency,
            "admitted_at": _iso(self.admitted_at),
        }
        if self.discharged_at is not None:
            d["discharged_at"] = _iso(self.discharged_at)
        return d

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "Admission":
        discharged = d.get("discharged_at")
        return cls(
            urgency=_parse_enum(Urgency, d.get("urgency")),
            admitted_at=_parse_datetime(d.get("admitted_at")),
            discharged_at=_parse_datetime(discharged) if discharged is not None else None,
        )


@dataclass(frozen=True)
class PatientProfile:
    """Structured clinical record driving prompt assembly."""

    id: str
    synthetic_name: str
    age: int
    gender: Gender
    race: str
    blood_type: str
    allergies: tuple[str, ...] = ()
    diagnoses: tuple[Diagnosis, ...] = ()
    comorbidities: tuple[str, ...] = ()
    medication_courses: tuple[MedicationCourse, ...] = ()
    lab_results: tuple[Measurement, ...] = ()
    vitals: tuple[Measurement, ...] = ()
    admission: Optional[Admission] = None
    pregnancy_status: PregnancyStatus = PregnancyStatus.UNKNOWN
    lactation_status: LactationStatus = LactationStatus.UNKNOWN
    surgical_history: tuple[str, ...] = ()
    verified: bool = False

    def current_drug_names(self) -> list[str]:
        """Drug names of ongoing courses (no end date)."""
        return [c.drug_name for c in self.medication_courses if c.end is None]

    def verify(self) -> "PatientProfile":
        return replace(self, verified=True)

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "id": self.id,
            "synthetic_name": self.synthetic_name,
            "age": self.age,
            "gender": self.gender.value if isinstance(self.gender, Gender) else self.gender,
            "race": self.race,
            "blood_type": self.blood_type,
            "allergies": list(self.allergies),
            "diagnoses": [x.to_dict() for x in self.diagnoses],
            "comorbidities": list(self.comorbidities),
            "medication_courses": [x.to_dict() for x in self.medication_courses],
            "lab_results": [x.to_dict() for x in self.lab_results],
            "vitals": [x.to_dict() for x in self.vitals],
            "pregnancy_status": self.pregnancy_status.value
            if isinstance(self.pregnancy_status, PregnancyStatus)
            else self.pregnancy_status,
            "lactation_status": self.lactation_status.value
            if isinstance(self.lactation_status, LactationStatus)
            else self.lactation_status,
            "surgical_history": list(self.surgical_history),
            "verified": self.verified,
        }
        if self.admission is not None:
            d["admission"] = self.admission.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "PatientProfile":
        """Lenient decode: unknown or malformed values are preserved as-is
        so :func:`validate_profile` can report them instead of crashing."""
        admission = d.get("admission")
        return cls(
            id=d.get("id", ""),
            synthetic_name=d.get("synthetic_name", ""),
            age=d.get("age"),
            gender=_parse_enum(Gender, d.get("gender")),
            race=d.get("race", ""),
            blood_type=d.get("blood_type", ""),
            allergies=tuple(d.get("allergies", ())),
            diagnoses=tuple(Diagnosis.from_dict(x) for x in d.get("diagnoses", ())),
            comorbidities=tuple(d.get("comorbidities", ())),
            medication_courses=tuple(
                MedicationCourse.from_dict(x) for x in d.get("medication_courses", ())
            ),
            lab_results=tuple(Measurement.from_dict(x) for x in d.get("lab_results", ())),
            vitals=tuple(Measurement.from_dict(x) for x in d.get("vitals", ())),
            admission=Admission.from_dict(admission) if isinstance(admission, Mapping) else None,
            pregnancy_status=_parse_enum(
                PregnancyStatus, d.get("pregnancy_status", PregnancyStatus.UNKNOWN.value)
            ),
            lactation_status=_parse_enum(
                LactationStatus, d.get("lactation_status", LactationStatus.UNKNOWN.value)
            ),
            surgical_history=tuple(d.get("surgical_history", ())),
            verified=bool(d.get("verified", False)),
        )


@dataclass(frozen=True)
class Medication:
    """Catalog entry tying a medication to its ingested label document."""

    id: str
    name: str
    smpc_doc_id: str

    def to_dict(self) -> dict[str, Any]:
        return {"id": self.id, "name": self.name, "smpc_doc_id": self.smpc_doc_id}

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "Medication":
        return cls(id=d["id"], name=d["name"], smpc_doc_id=d["smpc_doc_id"])


@dataclass(frozen=True)
class CheckResult:
    result: ResultLabel
    reason: str

    def to_dict(self) -> dict[str, Any]:
        return {"result": self.result.value, "reason": self.reason}

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "CheckResult":
        return cls(result=ResultLabel(d["result"]), reason=d.get("reason", ""))


@dataclass(frozen=True)
class OverallAssessment:
    score: int
    reason: str

    def to_dict(self) -> dict[str, Any]:
        return {"score": self.score, "reason": self.reason}

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "OverallAssessment":
        return cls(score=d["score"], reason=d.get("reason", ""))


@dataclass(frozen=True)
class SuitabilityReport:
    """Validated per-class risk assessment for one (patient, medication) run.

    ``status == Invalid`` means the model output failed schema validation:
    ``checks`` and ``overall`` may be None, but ``raw_response`` is always
    preserved byte-exact for audit, and ``failure_reason`` carries the
    machine-readable cause.
    """

    id: str
    patient_id: str
    medication_id: str
    model_id: str
    rag_enabled: bool
    checks: Optional[Mapping[InteractionClass, CheckResult]]
    overall: Optional[OverallAssessment]
    retrieved_chunk_ids: tuple[str, ...]
    raw_response: str
    created_at: datetime
    status: ReportStatus
    failure_reason: Optional[str] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "patient_id": self.patient_id,
            "medication_id": self.medication_id,
            "model_id": self.model_id,
            "rag_enabled": self.rag_enabled,
            "checks": {k.value: v.to_dict() for k, v in self.checks.items()}
            if self.checks is not None
            else None,
            "overall": self.overall.to_dict() if self.overall is not None else None,
            "retrieved_chunk_ids": list(self.retrieved_chunk_ids),
            "raw_response": self.raw_response,
            "created_at": _iso(self.created_at),
            "status": self.status.value,
            "failure_reason": self.failure_reason,
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "SuitabilityReport":
        checks = d.get("checks")
        overall = d.get("overall")
        return cls(
            id=d["id"],
            patient_id=d["patient_id"],
            medication_id=d["medication_id"],
            model_id=d["model_id"],
            rag_enabled=bool(d["rag_enabled"]),
            checks={
                InteractionClass(k): CheckResult.from_dict(v) for k, v in checks.items()
            }
            if checks is not None
            else None,
            overall=OverallAssessment.from_dict(overall) if overall is not None else None,
            retrieved_chunk_ids=tuple(d.get("retrieved_chunk_ids", ())),
            raw_response=d.get("raw_response", ""),
            created_at=_parse_datetime(d.get("created_at")),
            status=ReportStatus(d["status"]),
            failure_reason=d.get("failure_reason"),
        )


@dataclass(frozen=True)
class GroundTruthSet:
    """Expected label per (patient, medication, class), curated from SmPCs."""

    entries: Mapping[tuple[str, str, InteractionClass], ResultLabel]

    def labels_for(self, patient_id: str, medication_id: str) -> dict[InteractionClass, ResultLabel]:
        return {
            cls: label
            for (pid, mid, cls), label in self.entries.items()
            if pid == patient_id and mid == medication_id
        }

    def to_records(self) -> list[dict[str, str]]:
        records = [
            {
                "patient_id": pid,
                "medication_id": mid,
                "class": cls.value,
                "label": label.value,
            }
            for (pid, mid, cls), label in self.entries.items()
        ]
        records.sort(key=lambda r: (r["patient_id"], r["medication_id"], r["class"]))
        return records

    @classmethod
    def from_records(cls, records: Iterable[Mapping[str, str]]) -> "GroundTruthSet":
        entries: dict[tuple[str, str, InteractionClass], ResultLabel] = {}
        for rec in records:
            key = (rec["patient_id"], rec["medication_id"], InteractionClass(rec["class"]))
            if key in entries:
                raise ValueError(f"duplicate ground-truth entry for {key}")
            entries[key] = ResultLabel(rec["label"])
        return cls(entries=entries)


#: The five subjective review dimensions, in reporting order.
REVIEW_METRICS = ("msa", "did", "psda", "pss", "ga")


@dataclass(frozen=True)
class SubjectiveReview:
    """Clinician grading of one assessment, five 1..5 scores."""

    reviewer_id: str
    patient_id: str
    model_id: str
    rag_enabled: bool
    msa: int
    did: int
    psda: int
    pss: int
    ga: int
    created_at: datetime
    notes: Optional[str] = None

    def scores(self) -> dict[str, int]:
        return {name: getattr(self, name) for name in REVIEW_METRICS}

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "reviewer_id": self.reviewer_id,
            "patient_id": self.patient_id,
            "model_id": self.model_id,
            "rag_enabled": self.rag_enabled,
            "msa": self.msa,
            "did": self.did,
            "psda": self.psda,
            "pss": self.pss,
            "ga": self.ga,
            "created_at": _iso(self.created_at),
        }
        if self.notes is not None:
            d["notes"] = self.notes
        return d

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "SubjectiveReview":
        return cls(
            reviewer_id=d["reviewer_id"],
            patient_id=d["patient_id"],
            model_id=d["model_id"],
            rag_enabled=bool(d["rag_enabled"]),
            msa=d["msa"],
            did=d["did"],
            psda=d["psda"],
            pss=d["pss"],
            ga=d["ga"],
            created_at=_parse_datetime(d.get("created_at")),
            notes=d.get("notes"),
        )


@dataclass(frozen=True)
class ClassMetrics:
    """Classification metrics for one interaction class in one table cell."""

    interaction_class: InteractionClass
    accuracy: float
    precision: float
    recall: float
    f1: float
    support: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "interaction_class": self.interaction_class.value,
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "support": self.support,
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "ClassMetrics":
        return cls(
            interaction_class=InteractionClass(d["interaction_class"]),
            accuracy=d["accuracy"],
            precision=d["precision"],
            recall=d["recall"],
            f1=d["f1"],
            support=d["support"],
        )


@dataclass(frozen=True)
class Violation:
    """One violated invariant, addressed to the offending field."""

    field: str
    message: str

    def to_dict(self) -> dict[str, str]:
        return {"field": self.field, "message": self.message}


def validate_profile(profile: PatientProfile) -> list[Violation]:
    """Check every profile invariant; return all violations, not just the first.

    Total over arbitrary field contents: malformed values become violations,
    never exceptions.
    """
    violations: list[Violation] = []

    if not isinstance(profile.age, int) or isinstance(profile.age, bool):
        violations.append(Violation("age", "age must be an integer"))
    elif not 0 <= profile.age <= 150:
        violations.append(Violation("age", "age must be between 0 and 150"))

    if not isinstance(profile.gender, Gender):
        allowed = ", ".join(g.value for g in Gender)
        violations.append(Violation("gender", f"gender must be one of: {allowed}"))

    if profile.admission is not None and not isinstance(profile.admission.urgency, Urgency):
        allowed = ", ".join(u.value for u in Urgency)
        violations.append(
            Violation("admission.urgency", f"urgency must be one of: {allowed}")
        )

    if not isinstance(profile.pregnancy_status, PregnancyStatus):
        violations.append(
            Violation("pregnancy_status", "unrecognized pregnancy_status value")
        )
    if not isinstance(profile.lactation_status, LactationStatus):
        violations.append(
            Violation("lactation_status", "unrecognized lactation_status value")
        )

    if profile.gender == Gender.MALE:
        if (
            isinstance(profile.pregnancy_status, PregnancyStatus)
            and profile.pregnancy_status != PregnancyStatus.NOT_PREGNANT
        ):
            violations.append(
                Violation("pregnancy_status", "pregnancy_status inconsistent with gender")
            )
        if (
            isinstance(profile.lactation_status, LactationStatus)
            and profile.lactation_status != LactationStatus.NOT_LACTATING
        ):
            violations.append(
                Violation("lactation_status", "lactation_status inconsistent with gender")
            )

    for i, course in enumerate(profile.medication_courses):
        prefix = f"medication_courses[{i}]"
        if not isinstance(course.drug_name, str) or not course.drug_name.strip():
            violations.append(Violation(f"{prefix}.drug_name", "drug_name must be non-empty"))
        if not isinstance(course.dose_value, (int, float)) or isinstance(course.dose_value, bool):
            violations.append(Violation(f"{prefix}.dose_value", "dose_value must be a number"))
        elif not course.dose_value > 0:
            violations.append(Violation(f"{prefix}.dose_value", "dose_value must be positive"))
        if not isinstance(course.start, date):
            violations.append(Violation(f"{prefix}.start", "start must be an ISO date"))
        if course.end is not None:
            if not isinstance(course.end, date):
                violations.append(Violation(f"{prefix}.end", "end must be an ISO date"))
            elif isinstance(course.start, date) and course.end < course.start:
                violations.append(Violation(f"{prefix}.end", "course end precedes start"))

    return violations


def validate_report(report: SuitabilityReport) -> list[Violation]:
    """Check SuitabilityReport invariants; used at service boundaries."""
    violations: list[Violation] = []
    if report.status == ReportStatus.VALID:
        if report.checks is None or set(report.checks) != set(InteractionClass):
            violations.append(
                Violation("checks", "valid report must carry exactly one check per class")
            )
        if report.overall is None:
            violations.append(Violation("overall", "valid report must carry an overall score"))
        elif not (
            isinstance(report.overall.score, int) and 0 <= report.overall.score <= 100
        ):
            violations.append(Violation("overall.score", "score must be an integer in [0, 100]"))
    if not report.rag_enabled and report.retrieved_chunk_ids:
        violations.append(
            Violation("retrieved_chunk_ids", "non-RAG report must not carry retrieved chunks")
        )
    return violations
