#!/usr/bin/env python3
"""Spreadsheet-style oracle for the review summary.

Reads the review fixtures and computes per-(model, rag) means with pandas,
independent of rxguard.evaluation. Frozen into
fixtures/golden/review_summary_golden.csv.
"""
from __future__ import annotations

import json
from pathlib import Path

import pandas as pd

ROOT = Path(__file__).resolve().parents[1]
REVIEW_DIR = ROOT / "fixtures" / "reviews"
OUT_PATH = ROOT / "fixtures" / "golden" / "review_summary_golden.csv"

METRICS = ["msa", "did", "psda", "pss", "ga"]


def main() -> None:
    frame = pd.DataFrame(
        [json.loads(p.read_text(encoding="utf-8")) for p in sorted(REVIEW_DIR.glob("*.json"))]
    )
    grouped = frame.groupby(["model_id", "rag_enabled"])[METRICS].mean().reset_index()
    grouped["overall"] = grouped[METRICS].mean(axis=1)
    grouped["review_count"] = (
        frame.groupby(["model_id", "rag_enabled"]).size().reset_index(drop=True)
    )
    grouped = grouped.sort_values(["model_id", "rag_enabled"])

    OUT_PATH.parent.mkdir(parents=True, exist_ok=True)
    with open(OUT_PATH, "w", encoding="utf-8", newline="") as fh:
        fh.write("model,rag,msa,did,psda,pss,ga,overall,review_count\n")
        for _, row in grouped.iterrows():
            rag = "true" if row["rag_enabled"] else "false"
            values = ",".join(f"{row[m]:.12g}" for m in METRICS + ["overall"])
            fh.write(f"{row['model_id']},{rag},{values},{int(row['review_count'])}\n")
    print(f"wrote {len(grouped)} summary rows to {OUT_PATH}")


if __name__ == "__main__":
    main()
