"""Retrieval queries, RAG context bundles, and suitability prompt rendering.

Prompt rendering is deterministic down to the byte: equal inputs produce
byte-equal prompts, which is what makes recorded-completion replay and the
golden prompt fixtures possible.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Optional

from .domain import InteractionClass, Medication, PatientProfile, canonical_class_order
from .embedding import EmbeddingProvider, embed
from .errors import RxGuardError
from .index import VectorIndex
from .smpc import Chunk, SectionKind


class UnverifiedProfile(RxGuardError):
    """Retrieval requires a clinician-verified profile."""


class NotIndexed(RxGuardError):
    """The medication's SmPC has no chunks in the vector index."""


#: Output-schema key order in the rendered prompt. Deliberately different
#: from the canonical class order used internally.
PROMPT_KEY_ORDER: tuple[str, ...] = (
    InteractionClass.AGE.value,
    InteractionClass.DOSE.value,
    InteractionClass.COMORBIDITIES.value,
    InteractionClass.CONTRAINDICATIONS.value,
    InteractionClass.PREGNANCY.value,
    InteractionClass.LACTATION.value,
    InteractionClass.WARNINGS.value,
    InteractionClass.GENETICS.value,
    "Overall Suitability",
)

PERSONA_TEXT = (
    "You are an experienced and helpful prescribing assistant named Charlie. "
    "Charlie can support prescribers to carry out relevant checks when prescribing "
    "medication based on the patient medical profile and medical knowledge. "
    "You should tell us if the medication is suitable for the user based on the "
    "following patient profile and provide the result in JSON format:"
)

INSTRUCTIONS_TEXT = (
    'For each check, use the terms "Suitable" or "Risky" to indicate whether the '
    "medication is appropriate based on the given parameter. In overall suitability, "
    "the result should be given as a score. If any check is not relevant (such as "
    "pregnancy and lactation for males), mark it as N/A."
)

CONTEXT_HEADER = "--- SmPC CONTEXT ---"
CONTEXT_FOOTER = "--- END SmPC CONTEXT ---"


@dataclass(frozen=True)
class ContextChunk:
    chunk_id: str
    section: SectionKind
    text: str
    similarity: float


@dataclass(frozen=True)
class ContextBundle:
    """Top-k retrieved SmPC fragments for one (patient, medication) query."""

    medication_id: str
    chunks: tuple[ContextChunk, ...]
    k_requested: int
    query_text: str

    def chunk_ids(self) -> tuple[str, ...]:
        return tuple(c.chunk_id for c in self.chunks)


@dataclass(frozen=True)
class Prompt:
    system_text: str
    user_text: str
    rag_enabled: bool
    rendered: str

    def messages(self) -> list[dict[str, str]]:
        return [
            {"role": "system", "content": self.system_text},
            {"role": "user", "content": self.user_text},
        ]


def build_query(profile: PatientProfile, medication: Medication) -> str:
    """Deterministic retrieval query: medication name, the eight class names,
    then the profile salients, all lowercase and single-space separated."""
    if not profile.verified:
        raise UnverifiedProfile(f"profile {profile.id} has not been verified")
    parts: list[str] = [medication.name]
    parts.extend(cls.value for cls in canonical_class_order())
    parts.append(str(profile.age))
    parts.append(profile.gender.value if hasattr(profile.gender, "value") else str(profile.gender))
    parts.extend(profile.comorbidities)
    parts.extend(profile.allergies)
    parts.extend(profile.current_drug_names())
    parts.append(
        profile.pregnancy_status.value
        if hasattr(profile.pregnancy_status, "value")
        else str(profile.pregnancy_status)
    )
    parts.append(
        profile.lactation_status.value
        if hasattr(profile.lactation_status, "value")
        else str(profile.lactation_status)
    )
    return " ".join(" ".join(p.lower().split()) for p in parts if p)


def retrieve_context(
    profile: PatientProfile,
    medication: Medication,
    *,
    index: VectorIndex,
    provider: EmbeddingProvider,
    chunks_by_id: Mapping[str, Chunk],
    k: int = 6,
) -> ContextBundle:
    """Top-k chunks of the medication's SmPC for the profile's query."""
    if index.medication_count(medication.id) == 0:
        raise NotIndexed(f"no indexed chunks for medication {medication.id}")
    query_text = build_query(profile, medication)
    hits = index.top_k(embed(query_text, provider), k, medication_id=medication.id)
    chunks = []
    for chunk_id, similarity in hits:
        chunk = chunks_by_id[chunk_id]
        chunks.append(
            ContextChunk(
                chunk_id=chunk_id,
                section=chunk.section,
                text=chunk.text,
                similarity=similarity,
            )
        )
    return ContextBundle(
        medication_id=medication.id,
        chunks=tuple(chunks),
        k_requested=k,
        query_text=query_text,
    )


def canonical_profile_json(profile: PatientProfile) -> str:
    """Key-sorted JSON with absent optional fields omitted."""
    return json.dumps(profile.to_dict(), indent=2, sort_keys=True)


def _schema_block() -> str:
    lines = ["{"]
    for key in PROMPT_KEY_ORDER:
        slot = '"score": <score>' if key == "Overall Suitability" else '"result": <result>'
        comma = "," if key != PROMPT_KEY_ORDER[-1] else ""
        lines.append(f'  "{key}": {{{slot}, "reason": <reason>}}{comma}')
    lines.append("}")
    return "\n".join(lines)


def assemble_prompt(
    profile: PatientProfile,
    medication: Medication,
    context: Optional[ContextBundle] = None,
) -> Prompt:
    """Render the suitability prompt; byte-stable for golden-file comparison.

    When a context bundle is given, exactly one delimited SmPC block is
    inserted between the profile and the instructions.
    """
    blocks: list[str] = [
        f"Medication under review: {medication.name}",
        "Patient profile:\n" + canonical_profile_json(profile),
    ]
    if context is not None:
        entries = "\n".join(f"[{c.section.value}] {c.text}" for c in context.chunks)
        blocks.append(f"{CONTEXT_HEADER}\n{entries}\n{CONTEXT_FOOTER}")
    blocks.append(INSTRUCTIONS_TEXT)
    blocks.append("Output format (JSON):\n" + _schema_block())

    user_text = "\n\n".join(blocks)
    rendered = f"{PERSONA_TEXT}\n\n{user_text}\n"
    return Prompt(
        system_text=PERSONA_TEXT,
        user_text=user_text,
        rag_enabled=context is not None,
        rendered=rendered,
    )
