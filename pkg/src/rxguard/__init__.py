"""rxguard: retrieval-grounded medication suitability screening."""

__version__ = "0.1.0"

from .domain import (
    CheckResult,
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
    validate_profile,
)

__all__ = [
    "CheckResult",
    "ClassMetrics",
    "GroundTruthSet",
    "InteractionClass",
    "Medication",
    "PatientProfile",
    "ReportStatus",
    "ResultLabel",
    "SubjectiveReview",
    "SuitabilityReport",
    "canonical_class_order",
    "validate_profile",
    "__version__",
]
