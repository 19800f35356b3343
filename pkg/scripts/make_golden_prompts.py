#!/usr/bin/env python3
"""Author the golden prompt fixtures for patient p001 and Warfarin.

The template is written out literally here, independent of
rxguard.prompting's renderer; the acceptance suite asserts byte equality
between the two. Retrieval is used only to pick the context chunks for the
RAG golden (k=2 keeps the file reviewable).
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from rxguard.domain import Medication, PatientProfile
from rxguard.embedding import HashEmbedder
from rxguard.index import IndexEntry, VectorIndex
from rxguard.prompting import retrieve_context
from rxguard.smpc import chunk_document, parse_smpc

OUT_DIR = ROOT / "fixtures" / "prompts"

PERSONA = (
    "You are an experienced and helpful prescribing assistant named Charlie. "
    "Charlie can support prescribers to carry out relevant checks when prescribing "
    "medication based on the patient medical profile and medical knowledge. "
    "You should tell us if the medication is suitable for the user based on the "
    "following patient profile and provide the result in JSON format:"
)

INSTRUCTIONS = (
    'For each check, use the terms "Suitable" or "Risky" to indicate whether the '
    "medication is appropriate based on the given parameter. In overall suitability, "
    "the result should be given as a score. If any check is not relevant (such as "
    "pregnancy and lactation for males), mark it as N/A."
)

SCHEMA = """{
  "Age": {"result": <result>, "reason": <reason>},
  "Dose": {"result": <result>, "reason": <reason>},
  "Comorbidities": {"result": <result>, "reason": <reason>},
  "Contraindications": {"result": <result>, "reason": <reason>},
  "Pregnancy": {"result": <result>, "reason": <reason>},
  "Lactation": {"result": <result>, "reason": <reason>},
  "Warnings": {"result": <result>, "reason": <reason>},
  "Genetics": {"result": <result>, "reason": <reason>},
  "Overall Suitability": {"score": <score>, "reason": <reason>}
}"""


def build_golden(profile_json: str, context_entries: list[str] | None) -> str:
    blocks = [
        PERSONA,
        "Medication under review: Warfarin",
        "Patient profile:\n" + profile_json,
    ]
    if context_entries is not None:
        blocks.append(
            "--- SmPC CONTEXT ---\n" + "\n".join(context_entries) + "\n--- END SmPC CONTEXT ---"
        )
    blocks.append(INSTRUCTIONS)
    blocks.append("Output format (JSON):\n" + SCHEMA)
    return "\n\n".join(blocks) + "\n"


def main() -> None:
    profile_dict = json.loads(
        (ROOT / "fixtures" / "profiles" / "p001.json").read_text(encoding="utf-8")
    )
    profile_json = json.dumps(profile_dict, indent=2, sort_keys=True)

    # Pick the two highest-ranked warfarin chunks for p001's query.
    provider = HashEmbedder()
    index = VectorIndex(dim=provider.dim)
    doc = parse_smpc(
        (ROOT / "fixtures" / "smpc" / "warfarin.txt").read_text(encoding="utf-8"),
        doc_id="warfarin",
        medication_name="Warfarin",
    )
    chunks_by_id = {}
    for chunk in chunk_document(doc):
        chunks_by_id[chunk.chunk_id] = chunk
        index.upsert(
            IndexEntry(
                chunk_id=chunk.chunk_id,
                medication_id="warfarin",
                vector=provider.embed_text(chunk.text),
            )
        )
    bundle = retrieve_context(
        PatientProfile.from_dict(profile_dict),
        Medication(id="warfarin", name="Warfarin", smpc_doc_id="warfarin"),
        index=index,
        provider=provider,
        chunks_by_id=chunks_by_id,
        k=2,
    )
    entries = [f"[{c.section.value}] {c.text}" for c in bundle.chunks]

    OUT_DIR.mkdir(parents=True, exist_ok=True)
    (OUT_DIR / "prompt_norag.txt").write_text(
        build_golden(profile_json, None), encoding="utf-8"
    )
    (OUT_DIR / "prompt_rag.txt").write_text(
        build_golden(profile_json, entries), encoding="utf-8"
    )
    print(f"wrote golden prompts to {OUT_DIR} (rag context: {len(entries)} chunks)")


if __name__ == "__main__":
    main()
