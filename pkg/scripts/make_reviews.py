#!/usr/bin/env python3
"""Author the 12-profile subjective review fixtures.

One expert reviewer grades every (patient, model, rag) cell on the five
dimensions. Scores are deterministic (hash-jittered around per-cell bases)
with the RAG score never below the no-RAG score for the same patient,
model and dimension.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from rxguard.hashing import fnv1a64

OUT_DIR = ROOT / "fixtures" / "reviews"

REVIEW_PATIENTS = [
    "p001", "p003", "p005", "p007", "p008", "p010",
    "p013", "p016", "p017", "p019", "p021", "p024",
]
METRICS = ("msa", "did", "psda", "pss", "ga")

# (model, rag) -> base score per metric; jitter subtracts at most 1.
BASES = {
    ("gpt-sim", False): {"msa": 4, "did": 5, "psda": 4, "pss": 4, "ga": 4},
    ("gpt-sim", True): {"msa": 5, "did": 5, "psda": 5, "pss": 5, "ga": 5},
    ("llama-sim", False): {"msa": 3, "did": 4, "psda": 3, "pss": 4, "ga": 3},
    ("llama-sim", True): {"msa": 4, "did": 5, "psda": 4, "pss": 5, "ga": 5},
}


def score(model: str, rag: bool, pid: str, metric: str) -> int:
    base = BASES[(model, rag)][metric]
    jitter = fnv1a64(f"review|{model}|{pid}|{metric}".encode()) % 3
    value = base - (1 if jitter == 0 else 0)
    if rag:
        # Grounded runs never score below the ungrounded run for the same cell.
        value = max(value, score(model, False, pid, metric))
    return max(1, min(5, value))


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    count = 0
    for model in ("gpt-sim", "llama-sim"):
        for rag in (False, True):
            for pid in REVIEW_PATIENTS:
                review = {
                    "reviewer_id": "clin01",
                    "patient_id": pid,
                    "model_id": model,
                    "rag_enabled": rag,
                    **{m: score(model, rag, pid, m) for m in METRICS},
                    "notes": None,
                    "created_at": "2024-06-10T10:00:00",
                }
                review = {k: v for k, v in review.items() if v is not None}
                rag_tag = "rag" if rag else "norag"
                path = OUT_DIR / f"clin01__{pid}__{model}__{rag_tag}.json"
                path.write_text(json.dumps(review, indent=2, sort_keys=True) + "\n", encoding="utf-8")
                count += 1
    print(f"wrote {count} reviews to {OUT_DIR}")


if __name__ == "__main__":
    main()
