"""Acceptance suite: one test per exit criterion, each at its stated
tolerance. A PASS/FAIL line per criterion is printed in the terminal
summary (see pytest_terminal_summary in conftest)."""
from __future__ import annotations

import csv
import json
import random
import time
from datetime import datetime
from io import StringIO
from pathlib import Path

import numpy as np
import pytest

from rxguard.domain import (
    GroundTruthSet,
    InteractionClass,
    Medication,
    ReportStatus,
    ResultLabel,
)
from rxguard.evaluation import ExperimentSpec, compute_metrics, run_experiment
from rxguard.gateway import FixtureStore, RecordedBackend
from rxguard.index import IndexEntry, VectorIndex
from rxguard.prompting import PROMPT_KEY_ORDER, assemble_prompt, retrieve_context
from rxguard.report import RunContext, parse_report
from rxguard.smpc import chunk_document
from tests.conftest import FIXTURES


# --- criterion 1: retrieval oracle -----------------------------------------


def test_acceptance_retrieval_oracle():
    """top_k is rank-exact against a brute-force scan at corpus scale."""
    started = time.monotonic()
    rng = np.random.default_rng(20240603)
    n, dim = 10_000, 256
    vectors = rng.normal(size=(n, dim))
    vectors /= np.linalg.norm(vectors, axis=1, keepdims=True)
    # plant exact duplicates so tie-breaking is exercised
    for dup in range(100):
        vectors[n - 100 + dup] = vectors[dup]
    ids = [f"chunk{i:05d}" for i in range(n)]
    medications = [f"med{i % 5}" for i in range(n)]

    index = VectorIndex(dim=dim)
    for i in range(n):
        index.upsert(IndexEntry(chunk_id=ids[i], medication_id=medications[i], vector=vectors[i]))

    # oracle view of the stored representation: unit float32 re-normalized
    stored = (vectors.astype(np.float32)).astype(np.float64)
    stored /= np.linalg.norm(stored, axis=1, keepdims=True)
    id_array = np.array(ids)

    queries = rng.normal(size=(100, dim))
    queries /= np.linalg.norm(queries, axis=1, keepdims=True)

    for qi, query in enumerate(queries):
        sims = np.array([np.dot(row, query) for row in stored])
        order = np.lexsort((id_array, -sims))
        for k in (1, 6, 50):
            expected = [(id_array[i], sims[i]) for i in order[:k]]
            actual = index.top_k(query, k=k)
            assert [cid for cid, _ in actual] == [cid for cid, _ in expected], f"query {qi} k={k}"
            for (_, got), (_, want) in zip(actual, expected):
                assert abs(got - want) <= 1e-9
    elapsed = time.monotonic() - started
    assert elapsed < 10.0, f"retrieval oracle took {elapsed:.1f}s"


# --- criterion 2: metrics oracle --------------------------------------------


def _confusion_oracle(pairs):
    scored = [(p, e) for p, e in pairs if e != ResultLabel.NA]
    total = len(scored)
    acc = sum(p == e for p, e in scored) / total
    weighted = {"p": 0.0, "r": 0.0, "f": 0.0}
    for label in (ResultLabel.SUITABLE, ResultLabel.RISKY):
        tp = sum(1 for p, e in scored if p == label and e == label)
        fp = sum(1 for p, e in scored if p == label and e != label)
        support = sum(1 for _, e in scored if e == label)
        prec = tp / (tp + fp) if tp + fp else 0.0
        rec = tp / support if support else 0.0
        f1 = 2 * prec * rec / (prec + rec) if prec + rec else 0.0
        weighted["p"] += support * prec
        weighted["r"] += support * rec
        weighted["f"] += support * f1
    return acc, weighted["p"] / total, weighted["r"] / total, weighted["f"] / total


def test_acceptance_metrics_oracle():
    """compute_metrics equals the confusion-matrix oracle on 1,000 random
    pair sets; weighted recall is accuracy (the 0.85/0.85 table pattern)."""
    started = time.monotonic()
    rng = random.Random(20240604)
    labels = [ResultLabel.SUITABLE, ResultLabel.RISKY, ResultLabel.NA]
    for _ in range(1_000):
        pairs = [
            (rng.choice(labels), rng.choice(labels[:2]))
            for _ in range(rng.randint(1, 60))
        ]
        metrics = compute_metrics(InteractionClass.AGE, pairs)
        acc, prec, rec, f1 = _confusion_oracle(pairs)
        assert abs(metrics.accuracy - acc) <= 1e-12
        assert abs(metrics.precision - prec) <= 1e-12
        assert abs(metrics.recall - rec) <= 1e-12
        assert abs(metrics.f1 - f1) <= 1e-12
        assert abs(metrics.recall - metrics.accuracy) <= 1e-12

    # the published-table pattern: 17/20 correct -> accuracy = recall = 0.85
    pattern = [(ResultLabel.SUITABLE, ResultLabel.SUITABLE)] * 14 + [
        (ResultLabel.RISKY, ResultLabel.RISKY)
    ] * 3 + [(ResultLabel.SUITABLE, ResultLabel.RISKY)] * 3
    metrics = compute_metrics(InteractionClass.AGE, pattern)
    assert metrics.accuracy == pytest.approx(0.85, abs=1e-12)
    assert metrics.recall == pytest.approx(0.85, abs=1e-12)

    elapsed = time.monotonic() - started
    assert elapsed < 5.0, f"metrics oracle took {elapsed:.1f}s"


# --- criterion 3: golden prompts ---------------------------------------------


def test_acceptance_golden_prompts(corpus, fixture_profiles):
    """Rendered prompts are byte-identical to the checked-in goldens."""
    warfarin = Medication(id="warfarin", name="Warfarin", smpc_doc_id="warfarin")
    profile = fixture_profiles["p001"]

    norag = assemble_prompt(profile, warfarin, None)
    golden_norag = (FIXTURES / "prompts" / "prompt_norag.txt").read_text(encoding="utf-8")
    assert norag.rendered == golden_norag

    bundle = retrieve_context(
        profile, warfarin,
        index=corpus["index"], provider=corpus["provider"],
        chunks_by_id=corpus["chunks_by_id"], k=2,
    )
    rag = assemble_prompt(profile, warfarin, bundle)
    golden_rag = (FIXTURES / "prompts" / "prompt_rag.txt").read_text(encoding="utf-8")
    assert rag.rendered == golden_rag

    # the 9-key schema block appears in the template's key order
    for rendered in (norag.rendered, rag.rendered):
        positions = [rendered.index(f'"{key}"') for key in PROMPT_KEY_ORDER]
        assert positions == sorted(positions)
    assert len(PROMPT_KEY_ORDER) == 9


# --- criterion 4: end-to-end regression ---------------------------------------


def test_acceptance_end_to_end_regression(corpus, fixture_profiles, medications, monkeypatch):
    """Full 25x5x2x2 replay reproduces the frozen golden table within 1e-9,
    deterministically and without any network access."""

    def refuse_network(*_args, **_kwargs):
        raise AssertionError("network access attempted during replay run")

    monkeypatch.setattr("httpx.post", refuse_network)
    monkeypatch.setattr("httpx.request", refuse_network)

    started = time.monotonic()
    spec = ExperimentSpec.from_dict(
        json.loads((FIXTURES / "experiment_full.json").read_text(encoding="utf-8"))
    )
    assert len(spec.patient_ids) == 25 and len(spec.medication_ids) == 5
    assert len(spec.model_ids) >= 2 and set(spec.rag_flags) == {False, True}

    truth = GroundTruthSet.from_records(
        json.loads((FIXTURES / "truth" / "ground_truth.json").read_text(encoding="utf-8"))
    )
    deps = dict(
        profiles=fixture_profiles,
        medications=medications,
        truth=truth,
        backends={
            model: RecordedBackend(model, FixtureStore(FIXTURES / "completions" / f"{model}.jsonl"))
            for model in spec.model_ids
        },
        index=corpus["index"],
        provider=corpus["provider"],
        chunks_by_id=corpus["chunks_by_id"],
        clock=lambda: datetime(2024, 6, 20, 12, 0),
    )
    first = run_experiment(spec, **deps)
    second = run_experiment(spec, **deps)
    assert first.table.to_csv() == second.table.to_csv()  # bit-stable replay

    assert len(first.reports) == 25 * 5 * 2 * 2
    assert not first.table.failures

    produced = {
        (r["model"], r["rag"], r["class"]): r
        for r in csv.DictReader(StringIO(first.table.to_csv()))
    }
    with open(FIXTURES / "golden" / "metrics_golden.csv", newline="", encoding="utf-8") as fh:
        golden = {(r["model"], r["rag"], r["class"]): r for r in csv.DictReader(fh)}
    assert produced.keys() == golden.keys()
    for key, golden_row in golden.items():
        for metric in ("accuracy", "precision", "recall", "f1"):
            assert float(produced[key][metric]) == pytest.approx(
                float(golden_row[metric]), abs=1e-9
            ), (key, metric)
        assert produced[key]["support"] == golden_row["support"], key
        assert produced[key]["invalid_count"] == golden_row["invalid_count"], key

    elapsed = time.monotonic() - started
    assert elapsed < 60.0, f"end-to-end regression took {elapsed:.1f}s"


# --- criterion 5: report parser robustness -------------------------------------


def _ctx() -> RunContext:
    return RunContext(
        report_id="acc", patient_id="p", medication_id="m", model_id="mod",
        rag_enabled=False, retrieved_chunk_ids=(), created_at=datetime(2024, 6, 20),
    )


def test_acceptance_report_parser_corpus():
    """The malformed-output corpus yields exactly its expected outcomes."""
    cases = json.loads((FIXTURES / "report_corpus" / "cases.json").read_text(encoding="utf-8"))
    assert len(cases) >= 50
    for case in cases:
        report = parse_report(case["raw"], _ctx())
        assert report.status.value == case["status"], case["name"]
        assert report.raw_response == case["raw"], case["name"]
        if case["status"] == "Invalid":
            assert report.failure_reason == case["reason"], case["name"]
        else:
            assert set(report.checks) == set(InteractionClass), case["name"]


def test_acceptance_report_parser_fuzz():
    """One million random byte strings, zero aborts."""
    rng = random.Random(20240605)
    ctx = _ctx()
    for _ in range(1_000_000):
        raw = bytes(rng.randrange(256) for _ in range(rng.randrange(0, 48)))
        report = parse_report(raw.decode("latin-1"), ctx)
        assert report.status in (ReportStatus.VALID, ReportStatus.INVALID)


# --- criterion 6: chunk coverage property ---------------------------------------


def test_acceptance_chunk_coverage(corpus):
    """Per-section chunk ranges cover each fixture SmPC without gaps; no
    chunk exceeds the window; chunking is deterministic."""
    window, overlap = 1000, 200
    for doc in corpus["docs"].values():
        first_pass = chunk_document(doc, window=window, overlap=overlap)
        second_pass = chunk_document(doc, window=window, overlap=overlap)
        assert [c.to_dict() for c in first_pass] == [c.to_dict() for c in second_pass]

        by_section = {}
        for chunk in first_pass:
            by_section.setdefault(chunk.section, []).append(chunk)
        for section, chunks in by_section.items():
            text = doc.sections[section]
            chunks.sort(key=lambda c: c.ordinal)
            assert chunks[0].char_start == 0
            assert chunks[-1].char_end == len(text)
            for prev, nxt in zip(chunks, chunks[1:]):
                assert nxt.char_start < prev.char_end  # overlap, never a gap
            for chunk in chunks:
                assert 0 < len(chunk.text) <= window
                assert chunk.text == text[chunk.char_start : chunk.char_end]


# --- criterion 7: service contract ------------------------------------------------


def test_acceptance_service_contract(tmp_path):
    """Every documented endpoint passes happy and error paths against the
    recorded backend, with no UI in the loop."""
    from fastapi.testclient import TestClient

    from rxguard.config import load_config
    from rxguard.service import create_app
    from tests.conftest import populate_store
    from tests.test_service import poll_job

    store = populate_store(tmp_path / "store")
    app = create_app(store, load_config(FIXTURES / "config" / "replay.json"))
    with TestClient(app) as client:
        # POST /patients: happy + violation paths
        profile = json.loads((FIXTURES / "profiles" / "p001.json").read_text())
        profile["id"] = "acc-patient"
        assert client.post("/patients", json=profile).status_code == 201
        bad = dict(profile, id="acc-bad", age=-1)
        response = client.post("/patients", json=bad)
        assert response.status_code == 422 and response.json()["details"]

        # GET /patients + /patients/{id}
        assert any(
            p["id"] == "acc-patient" for p in client.get("/patients").json()["patients"]
        )
        assert client.get("/patients/acc-patient").status_code == 200
        assert client.get("/patients/missing").status_code == 404

        # GET /medications
        meds = client.get("/medications").json()["medications"]
        assert {m["id"] for m in meds} == {
            "warfarin", "metformin", "levothyroxine", "lisinopril", "omeprazole"
        }
        assert all(m["smpc_available"] and m["indexed"] for m in meds)

        # POST /assessments + GET /assessments/{job}
        assert (
            client.post(
                "/assessments",
                json={"patient_id": "nope", "medication_id": "warfarin",
                      "model_id": "gpt-sim", "rag": False},
            ).status_code
            == 404
        )
        job_id = client.post(
            "/assessments",
            json={"patient_id": "p001", "medication_id": "warfarin",
                  "model_id": "gpt-sim", "rag": True},
        ).json()["job_id"]
        job = poll_job(client, job_id)
        assert job["state"] == "Done"
        assert job["report"]["status"] == "Valid"
        assert len(job["report"]["checks"]) == 8
        assert job["retrieved_chunks"]
        assert client.get("/assessments/unknown-job").status_code == 404

        # POST /reviews: happy + bounds
        review = {
            "reviewer_id": "acc-rev", "patient_id": "p001", "model_id": "gpt-sim",
            "rag_enabled": True, "msa": 5, "did": 5, "psda": 4, "pss": 5, "ga": 5,
        }
        assert client.post("/reviews", json=review).status_code == 201
        assert (
            client.post("/reviews", json=dict(review, psda=0)).status_code == 422
        )

        # GET /metrics slice
        rows = client.get("/metrics", params={"model": "gpt-sim", "rag": True}).json()["rows"]
        assert rows and all(r["model"] == "gpt-sim" for r in rows)
