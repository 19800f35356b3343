"""Durable flat-file storage for every entity kind.

One UTF-8 JSON document per entity, filename = id + ".json", laid out in
fixed subdirectories under a root. All writes go through write-temp-then-
rename so a torn write can never corrupt a committed entity. Multi-reader,
single-writer per entity kind.
"""
from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Any, Callable, TypeVar

from .domain import GroundTruthSet, PatientProfile, SubjectiveReview, SuitabilityReport
from .errors import RxGuardError, StorageFailure
from .smpc import Chunk, SmPCDocument

SCHEMA_VERSION = 1

SUBPATHS = (
    "profiles",
    "smpc",
    "chunks",
    "vectors",
    "reports",
    "truth",
    "fixtures",
    "reviews",
)

T = TypeVar("T")


class NotFound(RxGuardError):
    """No entity stored under that id."""


class SchemaVersionMismatch(RxGuardError):
    """Store was written by an incompatible schema version."""


class FileStore:
    """Filesystem-backed entity store rooted at one directory."""

    def __init__(self, root: Path | str) -> None:
        self.root = Path(root)

    # -- lifecycle -----------------------------------------------------------

    @classmethod
    def init(cls, root: Path | str) -> "FileStore":
        """Create the layout (idempotent) and stamp the schema version."""
        store = cls(root)
        try:
            store.root.mkdir(parents=True, exist_ok=True)
            for sub in SUBPATHS:
                (store.root / sub).mkdir(exist_ok=True)
            manifest = store.root / "manifest.json"
            if not manifest.exists():
                store._write_json(manifest, {"schema_version": SCHEMA_VERSION})
        except OSError as exc:
            raise StorageFailure(f"cannot initialize store at {store.root}: {exc}") from exc
        store.check_schema()
        return store

    def check_schema(self) -> None:
        manifest = self.root / "manifest.json"
        if not manifest.exists():
            raise StorageFailure(f"store at {self.root} is not initialized (run init)")
        try:
            version = json.loads(manifest.read_text(encoding="utf-8")).get("schema_version")
        except (OSError, ValueError) as exc:
            raise StorageFailure(f"unreadable store manifest: {exc}") from exc
        if version != SCHEMA_VERSION:
            raise SchemaVersionMismatch(
                f"store schema_version={version}, this build supports {SCHEMA_VERSION}"
            )

    # -- atomic JSON primitives ----------------------------------------------

    def _write_json(self, path: Path, payload: Any) -> None:
        data = json.dumps(payload, indent=2, sort_keys=True)
        try:
            fd, tmp_name = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
            try:
                with os.fdopen(fd, "w", encoding="utf-8") as fh:
                    fh.write(data)
                os.replace(tmp_name, path)
            except BaseException:
                if os.path.exists(tmp_name):
                    os.unlink(tmp_name)
                raise
        except OSError as exc:
            raise StorageFailure(f"cannot write {path}: {exc}") from exc

    def _read_json(self, path: Path, kind: str, entity_id: str) -> Any:
        if not path.exists():
            raise NotFound(f"{kind} {entity_id!r} not found")
        try:
            return json.loads(path.read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise StorageFailure(f"cannot read {path}: {exc}") from exc

    def _put(self, sub: str, entity_id: str, payload: Any) -> None:
        self._write_json(self.root / sub / f"{entity_id}.json", payload)

    def _get(self, sub: str, entity_id: str, decode: Callable[[Any], T]) -> T:
        return decode(self._read_json(self.root / sub / f"{entity_id}.json", sub, entity_id))

    def _list(self, sub: str) -> list[str]:
        directory = self.root / sub
        if not directory.is_dir():
            return []
        return sorted(p.stem for p in directory.glob("*.json"))

    def _delete(self, sub: str, entity_id: str) -> None:
        path = self.root / sub / f"{entity_id}.json"
        if not path.exists():
            raise NotFound(f"{sub} {entity_id!r} not found")
        path.unlink()

    # -- profiles --------------------------------------------------------------

    def put_profile(self, profile: PatientProfile) -> None:
        self._put("profiles", profile.id, profile.to_dict())

    def get_profile(self, profile_id: str) -> PatientProfile:
        return self._get("profiles", profile_id, PatientProfile.from_dict)

    def list_profiles(self) -> list[str]:
        return self._list("profiles")

    # -- SmPC documents and chunks ----------------------------------------------

    def put_document(self, doc: SmPCDocument) -> None:
        self._put("smpc", doc.doc_id, doc.to_dict())

    def get_document(self, doc_id: str) -> SmPCDocument:
        return self._get("smpc", doc_id, SmPCDocument.from_dict)

    def list_documents(self) -> list[str]:
        return self._list("smpc")

    def put_chunks(self, doc_id: str, chunks: list[Chunk]) -> None:
        self._put("chunks", doc_id, [c.to_dict() for c in chunks])

    def get_chunks(self, doc_id: str) -> list[Chunk]:
        return self._get("chunks", doc_id, lambda raw: [Chunk.from_dict(d) for d in raw])

    def list_chunked_documents(self) -> list[str]:
        return self._list("chunks")

    def all_chunks_by_id(self) -> dict[str, Chunk]:
        by_id: dict[str, Chunk] = {}
        for doc_id in self.list_chunked_documents():
            for chunk in self.get_chunks(doc_id):
                by_id[chunk.chunk_id] = chunk
        return by_id

    # -- reports -----------------------------------------------------------------

    def put_report(self, report: SuitabilityReport) -> None:
        self._put("reports", report.id, report.to_dict())

    def get_report(self, report_id: str) -> SuitabilityReport:
        return self._get("reports", report_id, SuitabilityReport.from_dict)

    def list_reports(self) -> list[str]:
        return self._list("reports")

    # -- ground truth --------------------------------------------------------------

    def put_truth(self, truth_id: str, truth: GroundTruthSet) -> None:
        self._put("truth", truth_id, truth.to_records())

    def get_truth(self, truth_id: str) -> GroundTruthSet:
        return self._get("truth", truth_id, GroundTruthSet.from_records)

    def list_truth(self) -> list[str]:
        return self._list("truth")

    # -- reviews ----------------------------------------------------------------

    @staticmethod
    def review_id(review: SubjectiveReview) -> str:
        rag = "rag" if review.rag_enabled else "norag"
        return f"{review.reviewer_id}__{review.patient_id}__{review.model_id}__{rag}"

    def put_review(self, review: SubjectiveReview) -> str:
        review_id = self.review_id(review)
        self._put("reviews", review_id, review.to_dict())
        return review_id

    def get_review(self, review_id: str) -> SubjectiveReview:
        return self._get("reviews", review_id, SubjectiveReview.from_dict)

    def list_reviews(self) -> list[str]:
        return self._list("reviews")

    def all_reviews(self) -> list[SubjectiveReview]:
        return [self.get_review(rid) for rid in self.list_reviews()]

    # -- vector index persistence ---------------------------------------------------

    @property
    def vectors_bin_path(self) -> Path:
        return self.root / "vectors" / "index.bin"

    @property
    def vectors_manifest_path(self) -> Path:
        return self.root / "vectors" / "manifest.json"

    @property
    def fixtures_dir(self) -> Path:
        return self.root / "fixtures"
