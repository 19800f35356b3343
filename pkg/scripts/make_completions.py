#!/usr/bin/env python3
"""Author the recorded completion fixtures for the two simulated backends.

Responses are synthesized from the ground truth with deterministic,
hash-seeded disagreement rates per (model, rag) cell, so the replayed
experiment shows the expected pattern: retrieval grounding helps, and the
weaker simulated model gains more. A handful of deliberately malformed
responses exercise the invalid-report path end to end.

Prompts are rendered through the real pipeline so the stored prompt hashes
match replay exactly.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from rxguard.domain import Medication, PatientProfile
from rxguard.embedding import HashEmbedder
from rxguard.gateway import CompletionRecord, prompt_hash
from rxguard.hashing import fnv1a64
from rxguard.index import IndexEntry, VectorIndex
from rxguard.prompting import PROMPT_KEY_ORDER, assemble_prompt, retrieve_context
from rxguard.smpc import chunk_document, parse_smpc

PROFILE_DIR = ROOT / "fixtures" / "profiles"
SMPC_DIR = ROOT / "fixtures" / "smpc"
TRUTH_PATH = ROOT / "fixtures" / "truth" / "ground_truth.json"
OUT_DIR = ROOT / "fixtures" / "completions"

MEDICATIONS = ["warfarin", "metformin", "levothyroxine", "lisinopril", "omeprazole"]

# Disagreement rate with ground truth, per mille.
ERROR_RATES = {
    ("gpt-sim", False): 180,
    ("gpt-sim", True): 80,
    ("llama-sim", False): 300,
    ("llama-sim", True): 120,
}

# (model, rag, patient, medication) -> malformation kind
MALFORMED = {
    ("gpt-sim", False, "p003", "metformin"): "missing_class",
    ("gpt-sim", True, "p007", "omeprazole"): "score_out_of_range",
    ("llama-sim", False, "p012", "warfarin"): "truncated",
    ("llama-sim", True, "p018", "levothyroxine"): "unknown_result",
    ("llama-sim", False, "p021", "omeprazole"): "no_json",
}

REASONS = {
    "Suitable": "No {cls} concern identified for {drug} in this profile.",
    "Risky": "Identified a {cls} risk for {drug}; see the product information.",
    "NA": "Not applicable for this patient.",
}


def h(seed: str) -> int:
    return fnv1a64(seed.encode("utf-8"))


def predicted_label(model: str, rag: bool, pid: str, med: str, cls: str, truth: str) -> str:
    """Truth label with a deterministic per-cell chance of disagreement."""
    roll = h(f"label|{model}|{rag}|{pid}|{med}|{cls}") % 1000
    if truth == "NA":
        # Simulated models nearly always honor the N/A instruction.
        return "Suitable" if roll < 40 else "NA"
    if roll >= ERROR_RATES[(model, rag)]:
        return truth
    # Disagreement: mostly the opposite label, sometimes an unwarranted N/A.
    if h(f"mode|{model}|{rag}|{pid}|{med}|{cls}") % 5 == 0:
        return "NA"
    return "Risky" if truth == "Suitable" else "Suitable"


def response_body(labels: dict[str, str], drug: str) -> dict:
    body = {}
    risky = sum(1 for v in labels.values() if v == "Risky")
    nas = sum(1 for v in labels.values() if v == "NA")
    for cls in PROMPT_KEY_ORDER[:-1]:
        label = labels[cls]
        body[cls] = {
            "result": "N/A" if label == "NA" else label,
            "reason": REASONS[label].format(cls=cls.lower(), drug=drug),
        }
    score = max(5, min(98, 95 - 12 * risky - 2 * nas))
    body["Overall Suitability"] = {
        "score": score,
        "reason": f"Overall assessment of {drug} reflecting {risky} risk flag(s).",
    }
    return body


def decorate(text: str, seed: str) -> str:
    style = h(f"style|{seed}") % 4
    if style == 0:
        return text
    if style == 1:
        return f"```json\n{text}\n```"
    if style == 2:
        return f"Here is my assessment: {text} Hope this helps."
    return f"Assessment complete. The structured result follows.\n{text}"


def malform(kind: str, body: dict, seed: str) -> str:
    if kind == "missing_class":
        del body["Genetics"]
        return json.dumps(body, indent=2)
    if kind == "score_out_of_range":
        body["Overall Suitability"]["score"] = 150
        return json.dumps(body, indent=2)
    if kind == "truncated":
        text = json.dumps(body, indent=2)
        return text[: len(text) // 2]
    if kind == "unknown_result":
        body["Dose"]["result"] = "maybe"
        return json.dumps(body, indent=2)
    if kind == "no_json":
        return "I could not produce a structured assessment for this request."
    raise ValueError(kind)


def main() -> None:
    profiles = {
        p["id"]: PatientProfile.from_dict(p)
        for p in (
            json.loads(f.read_text(encoding="utf-8"))
            for f in sorted(PROFILE_DIR.glob("*.json"))
        )
    }
    truth: dict[tuple[str, str, str], str] = {}
    for rec in json.loads(TRUTH_PATH.read_text(encoding="utf-8")):
        truth[(rec["patient_id"], rec["medication_id"], rec["class"])] = rec["label"]

    provider = HashEmbedder()
    index = VectorIndex(dim=provider.dim)
    chunks_by_id = {}
    medications = {}
    for med_id in MEDICATIONS:
        doc = parse_smpc(
            (SMPC_DIR / f"{med_id}.txt").read_text(encoding="utf-8"),
            doc_id=med_id,
            medication_name=med_id.capitalize(),
        )
        medications[med_id] = Medication(id=med_id, name=doc.medication_name, smpc_doc_id=med_id)
        for chunk in chunk_document(doc):
            chunks_by_id[chunk.chunk_id] = chunk
            index.upsert(
                IndexEntry(
                    chunk_id=chunk.chunk_id,
                    medication_id=med_id,
                    vector=provider.embed_text(chunk.text),
                )
            )

    OUT_DIR.mkdir(parents=True, exist_ok=True)
    for model in ("gpt-sim", "llama-sim"):
        lines = []
        for rag in (False, True):
            for pid in sorted(profiles):
                profile = profiles[pid]
                for med_id in MEDICATIONS:
                    medication = medications[med_id]
                    context = None
                    if rag:
                        context = retrieve_context(
                            profile,
                            medication,
                            index=index,
                            provider=provider,
                            chunks_by_id=chunks_by_id,
                            k=6,
                        )
                    prompt = assemble_prompt(profile, medication, context)
                    labels = {
                        cls: predicted_label(
                            model, rag, pid, med_id, cls, truth[(pid, med_id, cls)]
                        )
                        for cls in PROMPT_KEY_ORDER[:-1]
                    }
                    body = response_body(labels, medication.name)
                    kind = MALFORMED.get((model, rag, pid, med_id))
                    seed = f"{model}|{rag}|{pid}|{med_id}"
                    if kind is not None:
                        text = malform(kind, body, seed)
                    else:
                        text = decorate(json.dumps(body, indent=2), seed)
                    record = CompletionRecord(
                        prompt_hash=prompt_hash(prompt),
                        response_text=text,
                        model_id=model,
                        latency_ms=float(800 + h(f"latency|{seed}") % 2400),
                    )
                    lines.append(json.dumps(record.to_dict(), sort_keys=True))
        out = OUT_DIR / f"{model}.jsonl"
        out.write_text("\n".join(lines) + "\n", encoding="utf-8")
        print(f"wrote {len(lines)} records to {out}")


if __name__ == "__main__":
    main()
