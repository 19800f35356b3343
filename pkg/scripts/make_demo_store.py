#!/usr/bin/env python3
"""Populate a runnable store from the repo fixtures.

Used by the README walkthrough and by the frontend's scripted-session test
(which excludes the ui-demo profile so the console flow creates it).

Usage: make_demo_store.py <store-root> [--exclude-profile ID]...
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from rxguard.domain import GroundTruthSet, PatientProfile, SubjectiveReview
from rxguard.embedding import HashEmbedder
from rxguard.index import IndexEntry, VectorIndex
from rxguard.smpc import chunk_document, parse_smpc
from rxguard.store import FileStore

MEDICATIONS = ["warfarin", "metformin", "levothyroxine", "lisinopril", "omeprazole"]


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("root", type=Path)
    parser.add_argument("--exclude-profile", action="append", default=[])
    parser.add_argument("--with-reviews", action="store_true")
    args = parser.parse_args()

    store = FileStore.init(args.root)
    for path in sorted((ROOT / "fixtures" / "profiles").glob("*.json")):
        profile = PatientProfile.from_dict(json.loads(path.read_text(encoding="utf-8")))
        if profile.id in args.exclude_profile:
            continue
        store.put_profile(profile)

    provider = HashEmbedder()
    index = VectorIndex(dim=provider.dim)
    for mid in MEDICATIONS:
        doc = parse_smpc(
            (ROOT / "fixtures" / "smpc" / f"{mid}.txt").read_text(encoding="utf-8"),
            doc_id=mid,
            medication_name=mid.capitalize(),
        )
        chunks = chunk_document(doc)
        store.put_document(doc)
        store.put_chunks(mid, chunks)
        for chunk in chunks:
            index.upsert(
                IndexEntry(chunk_id=chunk.chunk_id, medication_id=mid,
                           vector=provider.embed_text(chunk.text))
            )
    index.save(store.vectors_bin_path, store.vectors_manifest_path)

    store.put_truth(
        "ground_truth",
        GroundTruthSet.from_records(
            json.loads((ROOT / "fixtures" / "truth" / "ground_truth.json").read_text(encoding="utf-8"))
        ),
    )
    if args.with_reviews:
        for path in sorted((ROOT / "fixtures" / "reviews").glob("*.json")):
            store.put_review(SubjectiveReview.from_dict(json.loads(path.read_text(encoding="utf-8"))))
    print(f"demo store ready at {args.root}")


if __name__ == "__main__":
    main()
