from __future__ import annotations

import csv
import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from rxguard.cli import main
from tests.conftest import FIXTURES, MEDICATION_IDS


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """An initialized store with all five SmPCs ingested and indexed via the CLI."""
    root = tmp_path_factory.mktemp("cli") / "data"
    runner = CliRunner()

    def run(*args, expect: int = 0):
        result = runner.invoke(main, ["--root", str(root), *args], catch_exceptions=False)
        assert result.exit_code == expect, result.output
        return result

    run("init")
    for mid in MEDICATION_IDS:
        run(
            "ingest-smpc", str(FIXTURES / "smpc" / f"{mid}.txt"),
            "--medication", mid.capitalize(),
        )
    run("index", "--all")

    # profiles and truth enter the store directly (profile intake is the
    # service's job; the CLI covers ingestion, indexing and evaluation)
    from rxguard.domain import GroundTruthSet, PatientProfile
    from rxguard.store import FileStore

    store = FileStore(root)
    for path in sorted((FIXTURES / "profiles").glob("*.json")):
        store.put_profile(PatientProfile.from_dict(json.loads(path.read_text())))
    store.put_truth(
        "ground_truth",
        GroundTruthSet.from_records(json.loads((FIXTURES / "truth" / "ground_truth.json").read_text())),
    )
    for review_path in sorted((FIXTURES / "reviews").glob("*.json")):
        from rxguard.domain import SubjectiveReview

        store.put_review(SubjectiveReview.from_dict(json.loads(review_path.read_text())))
    return root, run


class TestIngestAndIndex:
    def test_ingest_reports_counts(self, workspace):
        root, run = workspace
        result = run(
            "ingest-smpc", str(FIXTURES / "smpc" / "warfarin.txt"),
            "--medication", "Warfarin",
        )
        assert "warfarin" in result.output
        assert "6 sections" in result.output
        assert "chunks" in result.output

    def test_reingest_is_idempotent(self, workspace):
        root, run = workspace
        first = run("ingest-smpc", str(FIXTURES / "smpc" / "metformin.txt"), "--medication", "Metformin")
        second = run("ingest-smpc", str(FIXTURES / "smpc" / "metformin.txt"), "--medication", "Metformin")
        assert first.output == second.output

    def test_reindex_is_deterministic(self, workspace):
        root, run = workspace
        run("index", "--all")
        first = (root / "vectors" / "index.bin").read_bytes()
        run("index", "--all")
        assert (root / "vectors" / "index.bin").read_bytes() == first

    def test_missing_file_is_usage_error(self, workspace):
        root, _run = workspace
        runner = CliRunner()
        result = runner.invoke(main, ["--root", str(root), "ingest-smpc", "nope.txt", "--medication", "X"])
        assert result.exit_code == 2

    def test_uninitialized_store_is_runtime_error(self, tmp_path):
        runner = CliRunner()
        result = runner.invoke(
            main,
            ["--root", str(tmp_path / "empty"), "ingest-smpc",
             str(FIXTURES / "smpc" / "warfarin.txt"), "--medication", "Warfarin"],
        )
        assert result.exit_code == 1
        assert "error code=StorageFailure" in result.output


class TestAssess:
    def test_norag_assessment_prints_report(self, workspace):
        root, _run = workspace
        runner = CliRunner()
        result = runner.invoke(
            main,
            ["--root", str(root), "--config", str(FIXTURES / "config" / "replay.json"),
             "assess", "--patient", "p001", "--medication", "warfarin", "--model", "gpt-sim"],
            catch_exceptions=False,
        )
        assert result.exit_code == 0, result.output
        report = json.loads(result.output)
        assert report["status"] == "Valid"
        assert report["rag_enabled"] is False
        assert report["retrieved_chunk_ids"] == []

    def test_rag_assessment_carries_chunks(self, workspace):
        root, _run = workspace
        runner = CliRunner()
        result = runner.invoke(
            main,
            ["--root", str(root), "--config", str(FIXTURES / "config" / "replay.json"),
             "assess", "--patient", "p001", "--medication", "warfarin", "--model", "gpt-sim", "--rag"],
            catch_exceptions=False,
        )
        report = json.loads(result.output)
        assert report["rag_enabled"] is True
        assert len(report["retrieved_chunk_ids"]) == 6

    def test_unknown_model_fails_cleanly(self, workspace):
        root, _run = workspace
        runner = CliRunner()
        result = runner.invoke(
            main,
            ["--root", str(root), "--config", str(FIXTURES / "config" / "replay.json"),
             "assess", "--patient", "p001", "--medication", "warfarin", "--model", "gpt-9"],
        )
        assert result.exit_code == 1
        assert "error code=" in result.output


class TestEvaluate:
    def test_full_experiment_matches_golden_csv(self, workspace, tmp_path):
        root, _run = workspace
        out = tmp_path / "table.csv"
        runner = CliRunner()
        result = runner.invoke(
            main,
            ["--root", str(root), "--config", str(FIXTURES / "config" / "replay.json"),
             "evaluate", "--spec", str(FIXTURES / "experiment_full.json"), "--out", str(out)],
            catch_exceptions=False,
        )
        assert result.exit_code == 0, result.output

        def rows(path: Path) -> dict:
            with open(path, newline="") as fh:
                return {
                    (r["model"], r["rag"], r["class"]): r for r in csv.DictReader(fh)
                }

        produced = rows(out)
        golden = rows(FIXTURES / "golden" / "metrics_golden.csv")
        assert produced.keys() == golden.keys()
        for key, golden_row in golden.items():
            for metric in ("accuracy", "precision", "recall", "f1"):
                assert float(produced[key][metric]) == pytest.approx(
                    float(golden_row[metric]), abs=1e-9
                ), key
            assert produced[key]["support"] == golden_row["support"]
            assert produced[key]["invalid_count"] == golden_row["invalid_count"]

    def test_figures_rendered_alongside_csv(self, workspace, tmp_path):
        root, _run = workspace
        out = tmp_path / "report" / "table.csv"
        runner = CliRunner()
        spec = {
            "model_ids": ["gpt-sim"], "rag_flags": [False, True],
            "patient_ids": ["p001", "p002"], "medication_ids": ["warfarin"], "k": 6,
        }
        spec_path = tmp_path / "small_spec.json"
        spec_path.write_text(json.dumps(spec))
        result = runner.invoke(
            main,
            ["--root", str(root), "--config", str(FIXTURES / "config" / "replay.json"),
             "evaluate", "--spec", str(spec_path), "--out", str(out)],
            catch_exceptions=False,
        )
        assert result.exit_code == 0, result.output
        assert out.exists()
        assert (tmp_path / "report" / "table_metrics.png").stat().st_size > 0
        assert (tmp_path / "report" / "table_rag_effect.png").stat().st_size > 0

    def test_no_figures_flag(self, workspace, tmp_path):
        root, _run = workspace
        out = tmp_path / "bare.csv"
        spec = {
            "model_ids": ["gpt-sim"], "rag_flags": [False],
            "patient_ids": ["p001"], "medication_ids": ["warfarin"], "k": 6,
        }
        spec_path = tmp_path / "tiny_spec.json"
        spec_path.write_text(json.dumps(spec))
        runner = CliRunner()
        result = runner.invoke(
            main,
            ["--root", str(root), "--config", str(FIXTURES / "config" / "replay.json"),
             "evaluate", "--spec", str(spec_path), "--out", str(out), "--no-figures"],
            catch_exceptions=False,
        )
        assert result.exit_code == 0
        assert out.exists()
        assert not (tmp_path / "bare_metrics.png").exists()


class TestRecordFixtures:
    def test_records_completions_for_spec(self, workspace, tmp_path):
        root, _run = workspace
        spec = {
            "model_ids": ["gpt-sim"], "rag_flags": [False],
            "patient_ids": ["p001"], "medication_ids": ["warfarin"], "k": 6,
        }
        spec_path = tmp_path / "rec_spec.json"
        spec_path.write_text(json.dumps(spec))
        runner = CliRunner()
        result = runner.invoke(
            main,
            ["--root", str(root), "--config", str(FIXTURES / "config" / "replay.json"),
             "record-fixtures", "--spec", str(spec_path)],
            catch_exceptions=False,
        )
        assert result.exit_code == 0, result.output
        recorded = (root / "fixtures" / "gpt-sim.jsonl").read_text().strip().splitlines()
        assert len(recorded) == 1
        record = json.loads(recorded[0])
        assert record["model_id"] == "gpt-sim"
        assert len(record["prompt_hash"]) == 16


class TestReviewSummary:
    def test_summary_csv_and_figure(self, workspace, tmp_path):
        root, _run = workspace
        out = tmp_path / "reviews.csv"
        runner = CliRunner()
        result = runner.invoke(
            main,
            ["--root", str(root), "review-summary", "--out", str(out)],
            catch_exceptions=False,
        )
        assert result.exit_code == 0, result.output
        lines = out.read_text().splitlines()
        assert lines[0] == "model,rag,msa,did,psda,pss,ga,overall,review_count"
        assert len(lines) == 5  # 2 models x 2 rag flags
        assert (tmp_path / "reviews.png").stat().st_size > 0

    def test_raw_review_export(self, workspace, tmp_path):
        root, _run = workspace
        runner = CliRunner()
        result = runner.invoke(
            main,
            ["--root", str(root), "review-summary",
             "--out", str(tmp_path / "summary.csv"),
             "--raw-out", str(tmp_path / "raw.csv"), "--no-figures"],
            catch_exceptions=False,
        )
        assert result.exit_code == 0, result.output
        lines = (tmp_path / "raw.csv").read_text().splitlines()
        assert lines[0] == "reviewer_id,patient_id,model,rag,msa,did,psda,pss,ga,notes"
        assert len(lines) == 49  # 48 fixture reviews + header
