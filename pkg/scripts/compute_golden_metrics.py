#!/usr/bin/env python3
"""Compute the frozen golden metrics table from the recorded fixtures.

Deliberately independent of the package's report parser and metrics code:
responses are decoded with json.JSONDecoder.raw_decode over candidate
offsets, validity is re-derived from the output schema rules, and metrics
come from scikit-learn. Only prompt rendering/hashing is shared, to pair
each fixture line with its (model, rag, patient, medication) run.
"""
from __future__ import annotations

import csv
import json
import sys
from pathlib import Path

from sklearn.metrics import accuracy_score, precision_recall_fscore_support

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from rxguard.domain import Medication, PatientProfile
from rxguard.embedding import HashEmbedder
from rxguard.gateway import prompt_hash
from rxguard.index import IndexEntry, VectorIndex
from rxguard.prompting import assemble_prompt, retrieve_context
from rxguard.smpc import chunk_document, parse_smpc

PROFILE_DIR = ROOT / "fixtures" / "profiles"
SMPC_DIR = ROOT / "fixtures" / "smpc"
TRUTH_PATH = ROOT / "fixtures" / "truth" / "ground_truth.json"
COMPLETIONS_DIR = ROOT / "fixtures" / "completions"
SPEC_PATH = ROOT / "fixtures" / "experiment_full.json"
OUT_PATH = ROOT / "fixtures" / "golden" / "metrics_golden.csv"

CLASSES = [
    "Age", "Comorbidities", "Contraindications", "Dose",
    "Genetics", "Lactation", "Pregnancy", "Warnings",
]
NA_WORDS = {"n/a", "na", "not applicable"}


def extract_object(raw: str) -> dict | None:
    decoder = json.JSONDecoder()
    idx = raw.find("{")
    while idx != -1:
        try:
            obj, _end = decoder.raw_decode(raw, idx)
        except ValueError:
            idx = raw.find("{", idx + 1)
            continue
        return obj if isinstance(obj, dict) else None
    return None


def normalize(value: object) -> str | None:
    if not isinstance(value, str):
        return None
    token = value.strip().casefold()
    if token == "suitable":
        return "Suitable"
    if token == "risky":
        return "Risky"
    if token in NA_WORDS:
        return "NA"
    return None


def parse_predictions(raw: str) -> dict[str, str] | None:
    """Class -> label when the response satisfies the schema, else None."""
    obj = extract_object(raw)
    if obj is None:
        return None
    by_key = {str(k).strip().lower(): v for k, v in obj.items()}
    predictions: dict[str, str] = {}
    for cls in CLASSES:
        entry = by_key.get(cls.lower())
        if not isinstance(entry, dict):
            return None
        inner = {str(k).strip().lower(): v for k, v in entry.items()}
        label = normalize(inner.get("result"))
        if label is None:
            return None
        predictions[cls] = label
    overall = by_key.get("overall suitability", by_key.get("overallsuitability"))
    if not isinstance(overall, dict):
        return None
    inner = {str(k).strip().lower(): v for k, v in overall.items()}
    score = inner.get("score")
    if isinstance(score, str):
        try:
            score = float(score)
        except ValueError:
            return None
    if isinstance(score, bool) or not isinstance(score, (int, float)):
        return None
    if not 0 <= float(score) <= 100:
        return None
    return predictions


def main() -> None:
    spec = json.loads(SPEC_PATH.read_text(encoding="utf-8"))
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
    for med_id in spec["medication_ids"]:
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

    responses: dict[tuple[str, str], str] = {}
    for model in spec["model_ids"]:
        for line in (COMPLETIONS_DIR / f"{model}.jsonl").read_text(encoding="utf-8").splitlines():
            rec = json.loads(line)
            responses[(model, rec["prompt_hash"])] = rec["response_text"]

    rows = []
    for model in spec["model_ids"]:
        for rag in spec["rag_flags"]:
            invalid = 0
            pairs: dict[str, list[tuple[str, str]]] = {cls: [] for cls in CLASSES}
            for pid in spec["patient_ids"]:
                profile = profiles[pid]
                for med_id in spec["medication_ids"]:
                    medication = medications[med_id]
                    context = None
                    if rag:
                        context = retrieve_context(
                            profile, medication, index=index, provider=provider,
                            chunks_by_id=chunks_by_id, k=spec.get("k", 6),
                        )
                    prompt = assemble_prompt(profile, medication, context)
                    raw = responses[(model, prompt_hash(prompt))]
                    predictions = parse_predictions(raw)
                    if predictions is None:
                        invalid += 1
                        continue
                    for cls in CLASSES:
                        expected = truth[(pid, med_id, cls)]
                        if expected == "NA":
                            continue
                        pairs[cls].append((predictions[cls], expected))
            for cls in CLASSES:
                if not pairs[cls]:
                    continue
                y_pred = [p for p, _ in pairs[cls]]
                y_true = [e for _, e in pairs[cls]]
                accuracy = accuracy_score(y_true, y_pred)
                precision, recall, f1, _ = precision_recall_fscore_support(
                    y_true, y_pred,
                    labels=["Suitable", "Risky"],
                    average="weighted",
                    zero_division=0,
                )
                rows.append(
                    [
                        model,
                        "true" if rag else "false",
                        cls,
                        f"{accuracy:.12g}",
                        f"{precision:.12g}",
                        f"{recall:.12g}",
                        f"{f1:.12g}",
                        len(y_true),
                        invalid,
                    ]
                )

    OUT_PATH.parent.mkdir(parents=True, exist_ok=True)
    with open(OUT_PATH, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["model", "rag", "class", "accuracy", "precision", "recall", "f1", "support", "invalid_count"]
        )
        writer.writerows(rows)
    print(f"wrote {len(rows)} golden rows to {OUT_PATH}")


if __name__ == "__main__":
    main()
