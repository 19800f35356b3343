"""Parse, repair, and validate model output into a SuitabilityReport.

Exactly one repair pass is applied: extraction of the first balanced
top-level JSON object (string- and escape-aware). Inputs that remain
malformed yield an Invalid report carrying the raw response byte-exact and
one machine-readable failure reason:

    NoJsonFound | MissingClass(<name>) | UnknownResultValue(<value>)
    | ScoreOutOfRange | DuplicateClass

ScoreOutOfRange covers any unusable overall score, including non-numeric
ones. parse_report never raises on arbitrary input.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime
from typing import Optional

from .domain import (
    CheckResult,
    InteractionClass,
    OverallAssessment,
    ReportStatus,
    ResultLabel,
    SuitabilityReport,
    canonical_class_order,
    normalize_result_label,
)
from .prompting import PROMPT_KEY_ORDER

_CLASS_BY_KEY = {cls.value.lower(): cls for cls in InteractionClass}
_OVERALL_KEYS = {"overall suitability", "overallsuitability"}


@dataclass(frozen=True)
class RunContext:
    """Metadata for the run that produced the raw response."""

    report_id: str
    patient_id: str
    medication_id: str
    model_id: str
    rag_enabled: bool
    retrieved_chunk_ids: tuple[str, ...]
    created_at: datetime


class _JsonObject(list):
    """Marker for JSON objects decoded as (key, value) pair lists, so raw
    duplicate keys survive decoding."""


def repair_extract(raw: str) -> Optional[str]:
    """First substring that is a balanced top-level JSON object, or None.

    Scans brace depth while respecting string literals and escapes; fenced
    or prose-wrapped objects come out clean. Candidates that never balance
    are skipped in favor of later opening braces.
    """
    search_from = 0
    while True:
        start = raw.find("{", search_from)
        if start == -1:
            return None
        depth = 0
        in_string = False
        escaped = False
        for i in range(start, len(raw)):
            ch = raw[i]
            if in_string:
                if escaped:
                    escaped = False
                elif ch == "\\":
                    escaped = True
                elif ch == '"':
                    in_string = False
                continue
            if ch == '"':
                in_string = True
            elif ch == "{":
                depth += 1
            elif ch == "}":
                depth -= 1
                if depth == 0:
                    return raw[start : i + 1]
        search_from = start + 1


def _invalid(ctx: RunContext, raw: str, reason: str) -> SuitabilityReport:
    return SuitabilityReport(
        id=ctx.report_id,
        patient_id=ctx.patient_id,
        medication_id=ctx.medication_id,
        model_id=ctx.model_id,
        rag_enabled=ctx.rag_enabled,
        checks=None,
        overall=None,
        retrieved_chunk_ids=ctx.retrieved_chunk_ids,
        raw_response=raw,
        created_at=ctx.created_at,
        status=ReportStatus.INVALID,
        failure_reason=reason,
    )


def _as_inner_dict(value: object) -> Optional[dict[str, object]]:
    if not isinstance(value, _JsonObject):
        return None
    return {str(k).strip().lower(): _plain(v) for k, v in value}


def _plain(value: object) -> object:
    if isinstance(value, _JsonObject):
        return {str(k): _plain(v) for k, v in value}
    if isinstance(value, list):
        return [_plain(v) for v in value]
    return value


def _coerce_score(value: object) -> Optional[int]:
    if isinstance(value, bool):
        return None
    if isinstance(value, (int, float)):
        number = float(value)
    elif isinstance(value, str):
        try:
            number = float(value.strip())
        except ValueError:
            return None
    else:
        return None
    if not 0.0 <= number <= 100.0:
        return None
    return int(round(number))


def parse_report(raw: str, ctx: RunContext) -> SuitabilityReport:
    """Validate a raw model response against the output schema.

    On success every interaction class is mapped (keys case-insensitive,
    surrounding whitespace ignored, result strings normalized) and the
    overall score is an integer in [0, 100]. Any failure produces an
    Invalid report; nothing is ever raised.
    """
    candidate = repair_extract(raw)
    if candidate is None:
        return _invalid(ctx, raw, "NoJsonFound")
    try:
        parsed = json.loads(candidate, object_pairs_hook=_JsonObject)
    except (ValueError, RecursionError):
        return _invalid(ctx, raw, "NoJsonFound")
    if not isinstance(parsed, _JsonObject):
        return _invalid(ctx, raw, "NoJsonFound")

    checks: dict[InteractionClass, CheckResult] = {}
    overall_value: object = None
    overall_seen = False
    for key, value in parsed:
        normalized = str(key).strip().lower()
        cls = _CLASS_BY_KEY.get(normalized)
        if cls is not None:
            if cls in checks:
                return _invalid(ctx, raw, "DuplicateClass")
            entry = _as_inner_dict(value)
            if entry is None or "result" not in entry:
                return _invalid(ctx, raw, f"UnknownResultValue({_show(value)})")
            result_raw = entry["result"]
            label = (
                normalize_result_label(result_raw) if isinstance(result_raw, str) else None
            )
            if label is None:
                return _invalid(ctx, raw, f"UnknownResultValue({_show(result_raw)})")
            reason = entry.get("reason", "")
            checks[cls] = CheckResult(result=label, reason=_text(reason))
        elif normalized in _OVERALL_KEYS:
            if overall_seen:
                return _invalid(ctx, raw, "DuplicateClass")
            overall_seen = True
            overall_value = value
        # Unknown keys are ignored.

    for cls in canonical_class_order():
        if cls not in checks:
            return _invalid(ctx, raw, f"MissingClass({cls.value})")
    if not overall_seen:
        return _invalid(ctx, raw, f"MissingClass({PROMPT_KEY_ORDER[-1]})")

    overall_entry = _as_inner_dict(overall_value)
    if overall_entry is None or "score" not in overall_entry:
        return _invalid(ctx, raw, "ScoreOutOfRange")
    score = _coerce_score(overall_entry["score"])
    if score is None:
        return _invalid(ctx, raw, "ScoreOutOfRange")
    overall = OverallAssessment(score=score, reason=_text(overall_entry.get("reason", "")))

    return SuitabilityReport(
        id=ctx.report_id,
        patient_id=ctx.patient_id,
        medication_id=ctx.medication_id,
        model_id=ctx.model_id,
        rag_enabled=ctx.rag_enabled,
        checks=checks,
        overall=overall,
        retrieved_chunk_ids=ctx.retrieved_chunk_ids,
        raw_response=raw,
        created_at=ctx.created_at,
        status=ReportStatus.VALID,
        failure_reason=None,
    )


def _text(value: object) -> str:
    if isinstance(value, str):
        return value
    if value is None:
        return ""
    return json.dumps(value)


def _show(value: object, limit: int = 60) -> str:
    text = value if isinstance(value, str) else json.dumps(_plain(value))
    return text if len(text) <= limit else text[: limit - 3] + "..."


def render_response(
    checks: dict[InteractionClass, CheckResult], overall: OverallAssessment
) -> str:
    """Serialize checks back into the prompt's output schema (used to author
    recorded fixtures and to test parse round-trips)."""
    body: dict[str, object] = {}
    for key in PROMPT_KEY_ORDER[:-1]:
        check = checks[InteractionClass(key)]
        result = "N/A" if check.result == ResultLabel.NA else check.result.value
        body[key] = {"result": result, "reason": check.reason}
    body[PROMPT_KEY_ORDER[-1]] = {"score": overall.score, "reason": overall.reason}
    return json.dumps(body, indent=2)
