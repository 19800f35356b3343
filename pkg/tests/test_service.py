from __future__ import annotations

import json
import time

import pytest
from fastapi.testclient import TestClient

from rxguard.config import load_config
from rxguard.service import create_app
from tests.conftest import FIXTURES, populate_store


@pytest.fixture(scope="module")
def client(tmp_path_factory):
    store = populate_store(tmp_path_factory.mktemp("svc") / "store")
    config = load_config(FIXTURES / "config" / "replay.json")
    app = create_app(store, config)
    with TestClient(app) as test_client:
        yield test_client


def poll_job(client: TestClient, job_id: str, timeout: float = 10.0) -> dict:
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        body = client.get(f"/assessments/{job_id}").json()
        if body["state"] in ("Done", "Failed"):
            return body
        time.sleep(0.02)
    raise AssertionError(f"job {job_id} did not settle within {timeout}s")


def _fresh_profile(pid: str, **overrides) -> dict:
    profile = {
        "id": pid,
        "synthetic_name": "Test Person",
        "age": 44,
        "gender": "female",
        "race": "white",
        "blood_type": "B+",
        "allergies": [],
        "diagnoses": [],
        "comorbidities": ["hypertension"],
        "medication_courses": [],
        "lab_results": [],
        "vitals": [],
        "admission": {"urgency": "elective", "admitted_at": "2024-06-04T10:00:00"},
        "pregnancy_status": "not_pregnant",
        "lactation_status": "not_lactating",
        "surgical_history": [],
        "verified": False,
    }
    profile.update(overrides)
    return profile


class TestPatients:
    def test_create_returns_201_and_id(self, client):
        response = client.post("/patients", json=_fresh_profile("svc-new1"))
        assert response.status_code == 201
        assert response.json() == {"id": "svc-new1"}

    def test_invalid_profile_gets_422_with_violations(self, client):
        bad = _fresh_profile("svc-bad", age=-3, gender="male", pregnancy_status="pregnant")
        response = client.post("/patients", json=bad)
        assert response.status_code == 422
        body = response.json()
        assert body["code"] == "ValidationFailed"
        fields = {v["field"] for v in body["details"]}
        assert "age" in fields and "pregnancy_status" in fields

    def test_get_unknown_is_404(self, client):
        response = client.get("/patients/who-dis")
        assert response.status_code == 404
        assert response.json()["code"] == "NotFound"

    def test_list_contains_fixture_profiles(self, client):
        body = client.get("/patients").json()
        ids = {p["id"] for p in body["patients"]}
        assert {"p001", "p013", "p025"} <= ids

    def test_round_trip_identity(self, client):
        profile = _fresh_profile("svc-rt")
        client.post("/patients", json=profile)
        assert client.get("/patients/svc-rt").json() == profile

    def test_update_then_verify(self, client):
        client.post("/patients", json=_fresh_profile("svc-edit"))
        updated = _fresh_profile("svc-edit", age=45)
        response = client.put("/patients/svc-edit", json=updated)
        assert response.status_code == 200
        assert response.json()["age"] == 45
        verified = client.post("/patients/svc-edit/verify")
        assert verified.status_code == 200
        assert verified.json()["verified"] is True

    def test_update_unknown_is_404(self, client):
        assert client.put("/patients/ghost", json=_fresh_profile("ghost")).status_code == 404


class TestMedications:
    def test_catalog_with_flags(self, client):
        body = client.get("/medications").json()
        by_id = {m["id"]: m for m in body["medications"]}
        assert set(by_id) == {"warfarin", "metformin", "levothyroxine", "lisinopril", "omeprazole"}
        assert by_id["warfarin"]["name"] == "Warfarin"
        assert by_id["warfarin"]["smpc_available"] is True
        assert by_id["warfarin"]["indexed"] is True


class TestAssessments:
    def test_unknown_patient_is_404(self, client):
        response = client.post(
            "/assessments",
            json={"patient_id": "ghost", "medication_id": "warfarin", "model_id": "gpt-sim", "rag": False},
        )
        assert response.status_code == 404

    def test_unknown_medication_is_404(self, client):
        response = client.post(
            "/assessments",
            json={"patient_id": "p001", "medication_id": "aspirin", "model_id": "gpt-sim", "rag": False},
        )
        assert response.status_code == 404

    def test_unknown_model_is_404(self, client):
        response = client.post(
            "/assessments",
            json={"patient_id": "p001", "medication_id": "warfarin", "model_id": "gpt-9", "rag": False},
        )
        assert response.status_code == 404

    def test_malformed_body_is_422(self, client):
        response = client.post("/assessments", json={"patient_id": "p001"})
        assert response.status_code == 422
        assert response.json()["code"] == "ValidationFailed"

    def test_happy_path_rag(self, client):
        started = time.monotonic()
        response = client.post(
            "/assessments",
            json={"patient_id": "p001", "medication_id": "warfarin", "model_id": "gpt-sim", "rag": True},
        )
        assert response.status_code == 202
        job = poll_job(client, response.json()["job_id"])
        assert time.monotonic() - started < 1.0  # replay needs no network
        assert job["state"] == "Done"
        report = job["report"]
        assert report["status"] == "Valid"
        assert set(report["checks"]) == {
            "Age", "Comorbidities", "Contraindications", "Dose",
            "Genetics", "Lactation", "Pregnancy", "Warnings",
        }
        assert 0 <= report["overall"]["score"] <= 100
        assert report["rag_enabled"] is True
        assert len(report["retrieved_chunk_ids"]) == 6
        chunks = job["retrieved_chunks"]
        assert [c["chunk_id"] for c in chunks] == report["retrieved_chunk_ids"]
        assert all(c["text"] for c in chunks)
        assert all(c["similarity"] is not None for c in chunks)

    def test_happy_path_norag_has_no_chunks(self, client):
        response = client.post(
            "/assessments",
            json={"patient_id": "p001", "medication_id": "warfarin", "model_id": "gpt-sim", "rag": False},
        )
        job = poll_job(client, response.json()["job_id"])
        assert job["state"] == "Done"
        assert job["report"]["retrieved_chunk_ids"] == []
        assert job["retrieved_chunks"] == []

    def test_invalid_model_output_surfaces_as_invalid_report(self, client):
        # gpt-sim no-RAG p003 x metformin replays the authored missing-class response
        response = client.post(
            "/assessments",
            json={"patient_id": "p003", "medication_id": "metformin", "model_id": "gpt-sim", "rag": False},
        )
        job = poll_job(client, response.json()["job_id"])
        assert job["state"] == "Done"
        report = job["report"]
        assert report["status"] == "Invalid"
        assert report["checks"] is None
        assert report["failure_reason"] == "MissingClass(Genetics)"
        assert report["raw_response"]

    def test_rag_on_unverified_profile_fails_job(self, client):
        client.post("/patients", json=_fresh_profile("svc-unverified"))
        response = client.post(
            "/assessments",
            json={"patient_id": "svc-unverified", "medication_id": "warfarin", "model_id": "gpt-sim", "rag": True},
        )
        job = poll_job(client, response.json()["job_id"])
        assert job["state"] == "Failed"
        assert "UnverifiedProfile" in job["error"]
        assert job["report_id"] is None

    def test_unknown_job_is_404(self, client):
        assert client.get("/assessments/nope").status_code == 404


class TestReviews:
    def test_create_review(self, client):
        response = client.post(
            "/reviews",
            json={
                "reviewer_id": "svc-c1", "patient_id": "p001", "model_id": "gpt-sim",
                "rag_enabled": True, "msa": 4, "did": 5, "psda": 4, "pss": 5, "ga": 5,
            },
        )
        assert response.status_code == 201
        assert response.json()["id"]

    def test_score_bounds_rejected_with_422(self, client):
        response = client.post(
            "/reviews",
            json={
                "reviewer_id": "svc-c1", "patient_id": "p001", "model_id": "gpt-sim",
                "rag_enabled": True, "msa": 4, "did": 5, "psda": 0, "pss": 5, "ga": 5,
            },
        )
        assert response.status_code == 422
        assert response.json()["code"] == "ScoreOutOfRange"

    def test_incomplete_review_rejected(self, client):
        response = client.post("/reviews", json={"reviewer_id": "svc-c1"})
        assert response.status_code == 422

    def test_summary_reflects_submissions(self, client):
        client.post(
            "/reviews",
            json={
                "reviewer_id": "svc-sum", "patient_id": "p002", "model_id": "sum-model",
                "rag_enabled": False, "msa": 5, "did": 5, "psda": 5, "pss": 5, "ga": 5,
            },
        )
        body = client.get("/reviews/summary", params={"model": "sum-model"}).json()
        assert len(body["cells"]) == 1
        cell = body["cells"][0]
        assert cell["overall"] == 5.0
        assert cell["review_count"] == 1

    def test_reviews_listing(self, client):
        body = client.get("/reviews").json()
        assert any(r["reviewer_id"] == "svc-c1" for r in body["reviews"])


class TestMetrics:
    def test_metrics_slice_from_archived_reports(self, client):
        # ensure at least one Done assessment is archived
        response = client.post(
            "/assessments",
            json={"patient_id": "p005", "medication_id": "metformin", "model_id": "gpt-sim", "rag": True},
        )
        poll_job(client, response.json()["job_id"])
        body = client.get("/metrics", params={"model": "gpt-sim", "rag": True}).json()
        assert body["rows"], "expected at least one metrics row"
        for row in body["rows"]:
            assert row["model"] == "gpt-sim"
            assert row["rag"] is True
            assert 0.0 <= row["accuracy"] <= 1.0
            assert row["recall"] == pytest.approx(row["accuracy"], abs=1e-12)

    def test_metrics_empty_scope(self, client):
        body = client.get("/metrics", params={"model": "never-ran"}).json()
        assert body["rows"] == []


class TestAuthToken:
    def test_token_enforced_when_configured(self, tmp_path, monkeypatch):
        store = populate_store(tmp_path / "store")
        config = load_config(FIXTURES / "config" / "replay.json")
        monkeypatch.setenv("RXGUARD_API_TOKEN", "hunter2")
        with TestClient(create_app(store, config)) as secure:
            denied = secure.get("/medications")
            assert denied.status_code == 401
            allowed = secure.get("/medications", headers={"Authorization": "Bearer hunter2"})
            assert allowed.status_code == 200
