from __future__ import annotations

import json
from datetime import date, datetime
from pathlib import Path

import pytest

from rxguard.domain import (
    Admission,
    Gender,
    LactationStatus,
    Medication,
    MedicationCourse,
    PatientProfile,
    PregnancyStatus,
    Urgency,
)
from rxguard.embedding import HashEmbedder
from rxguard.index import IndexEntry, VectorIndex
from rxguard.smpc import chunk_document, parse_smpc

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"

MEDICATION_IDS = ["warfarin", "metformin", "levothyroxine", "lisinopril", "omeprazole"]


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion at the end of the run."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" in nodeid and getattr(report, "when", "call") == "call":
                name = nodeid.split("::")[-1].replace("test_acceptance_", "")
                status = "PASS" if outcome == "passed" else "FAIL"
                lines.append(f"ACCEPTANCE {name}: {status}")
    if lines:
        terminalreporter.write_line("")
        for line in sorted(lines):
            terminalreporter.write_line(line)


def make_profile(**overrides) -> PatientProfile:
    """A well-formed 68-year-old female profile; override fields per test."""
    base = dict(
        id="pt-test",
        synthetic_name="Ada Example",
        age=68,
        gender=Gender.FEMALE,
        race="white",
        blood_type="O+",
        allergies=("penicillin",),
        diagnoses=(),
        comorbidities=("atrial fibrillation",),
        medication_courses=(
            MedicationCourse(
                drug_name="Levothyroxine",
                dose_value=100.0,
                dose_unit="microgram",
                schedule="once daily",
                start=date(2023, 1, 10),
            ),
        ),
        lab_results=(),
        vitals=(),
        admission=Admission(urgency=Urgency.ELECTIVE, admitted_at=datetime(2024, 6, 1, 9, 0)),
        pregnancy_status=PregnancyStatus.NOT_PREGNANT,
        lactation_status=LactationStatus.NOT_LACTATING,
        surgical_history=(),
        verified=True,
    )
    base.update(overrides)
    return PatientProfile(**base)


@pytest.fixture(scope="session")
def fixture_profiles() -> dict[str, PatientProfile]:
    profiles = {}
    for path in sorted((FIXTURES / "profiles").glob("*.json")):
        data = json.loads(path.read_text(encoding="utf-8"))
        profiles[data["id"]] = PatientProfile.from_dict(data)
    return profiles


@pytest.fixture(scope="session")
def medications() -> dict[str, Medication]:
    return {
        mid: Medication(id=mid, name=mid.capitalize(), smpc_doc_id=mid)
        for mid in MEDICATION_IDS
    }


def populate_store(root: Path) -> "FileStore":
    """Stand up a store exactly as the CLI flow would: profiles, SmPCs,
    chunks, persisted vector index, and ground truth from the repo fixtures."""
    from rxguard.store import FileStore

    store = FileStore.init(root)
    for path in sorted((FIXTURES / "profiles").glob("*.json")):
        store.put_profile(PatientProfile.from_dict(json.loads(path.read_text(encoding="utf-8"))))
    provider = HashEmbedder()
    index = VectorIndex(dim=provider.dim)
    for mid in MEDICATION_IDS:
        doc = parse_smpc(
            (FIXTURES / "smpc" / f"{mid}.txt").read_text(encoding="utf-8"),
            doc_id=mid,
            medication_name=mid.capitalize(),
        )
        chunks = chunk_document(doc)
        store.put_document(doc)
        store.put_chunks(mid, chunks)
        for chunk in chunks:
            index.upsert(
                IndexEntry(
                    chunk_id=chunk.chunk_id,
                    medication_id=mid,
                    vector=provider.embed_text(chunk.text),
                )
            )
    index.save(store.vectors_bin_path, store.vectors_manifest_path)
    from rxguard.domain import GroundTruthSet

    store.put_truth(
        "ground_truth",
        GroundTruthSet.from_records(
            json.loads((FIXTURES / "truth" / "ground_truth.json").read_text(encoding="utf-8"))
        ),
    )
    return store


@pytest.fixture(scope="session")
def corpus():
    """Parsed, chunked and indexed SmPC fixtures with the hash embedder."""
    provider = HashEmbedder()
    index = VectorIndex(dim=provider.dim)
    chunks_by_id = {}
    docs = {}
    for mid in MEDICATION_IDS:
        doc = parse_smpc(
            (FIXTURES / "smpc" / f"{mid}.txt").read_text(encoding="utf-8"),
            doc_id=mid,
            medication_name=mid.capitalize(),
        )
        docs[mid] = doc
        for chunk in chunk_document(doc):
            chunks_by_id[chunk.chunk_id] = chunk
            index.upsert(
                IndexEntry(
                    chunk_id=chunk.chunk_id,
                    medication_id=mid,
                    vector=provider.embed_text(chunk.text),
                )
            )
    return {"provider": provider, "index": index, "chunks_by_id": chunks_by_id, "docs": docs}
