"""Exact cosine-similarity vector index with filtered top-k retrieval.

The corpus is small (five medications, a few hundred chunks), so the index
is a brute-force scan by design: results are provably rank-identical to a
full-scan oracle, ties broken by chunk_id ascending. Upserts are O(1); the
scan matrix is rebuilt lazily, sorted by chunk_id so a stable sort on
similarity alone realizes the tie-break.

Vectors are normalized and quantized to float32 at upsert, which is also
the on-disk format: a freshly built index and one reloaded from disk hold
bit-identical state, so retrieval ranking (and therefore recorded-prompt
replay) never drifts across persistence.
"""
from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import RxGuardError, StorageFailure


class DimensionMismatch(RxGuardError):
    """Vector dimension differs from the index's configured dimension."""


class ZeroVector(RxGuardError):
    """Operation undefined for the all-zero vector."""


class EmptyIndex(RxGuardError):
    """No entries to search (after filtering)."""


#: Stored vectors must stay unit-length within this bound.
NORM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class IndexEntry:
    chunk_id: str
    medication_id: str
    vector: np.ndarray


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """dot(a, b) / (|a||b|), clamped into [-1, 1]."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"dimensions differ: {a.shape} vs {b.shape}")
    norm_a = np.linalg.norm(a)
    norm_b = np.linalg.norm(b)
    if norm_a == 0.0 or norm_b == 0.0:
        raise ZeroVector("cosine similarity undefined for the zero vector")
    return float(np.clip(np.dot(a, b) / (norm_a * norm_b), -1.0, 1.0))


def cosine_distance(a: np.ndarray, b: np.ndarray) -> float:
    return 1.0 - cosine_similarity(a, b)


class VectorIndex:
    """Maps chunk ids to L2-normalized vectors; supports exact filtered top-k.

    Concurrent reads are safe once built; writes must not race reads
    (single-writer discipline is the caller's responsibility).
    """

    def __init__(self, dim: int) -> None:
        if dim <= 0:
            raise DimensionMismatch("dimension must be positive")
        self._dim = dim
        # chunk_id -> (medication_id, float32 unit vector): canonical state,
        # identical in memory and on disk.
        self._entries: dict[str, tuple[str, np.ndarray]] = {}
        self._matrix: Optional[np.ndarray] = None
        self._ids: list[str] = []
        self._medications: list[str] = []

    @property
    def dim(self) -> int:
        return self._dim

    def __len__(self) -> int:
        return len(self._entries)

    def upsert(self, entry: IndexEntry) -> None:
        """Insert or replace; vectors are normalized and quantized on the way in."""
        vec = np.asarray(entry.vector, dtype=np.float64)
        if vec.shape != (self._dim,):
            raise DimensionMismatch(
                f"index dimension is {self._dim}, entry has shape {vec.shape}"
            )
        if not np.all(np.isfinite(vec)):
            raise ZeroVector("vector components must be finite")
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            raise ZeroVector("cannot index the zero vector")
        self._set_raw(entry.chunk_id, entry.medication_id, (vec / norm).astype("<f4"))

    def _set_raw(self, chunk_id: str, medication_id: str, quantized: np.ndarray) -> None:
        self._entries[chunk_id] = (medication_id, quantized)
        self._matrix = None

    @staticmethod
    def _unit(quantized: np.ndarray) -> np.ndarray:
        vec = quantized.astype(np.float64)
        return vec / np.linalg.norm(vec)

    def remove_medication(self, medication_id: str) -> int:
        """Drop all entries for one medication (re-ingest support)."""
        doomed = [cid for cid, (mid, _) in self._entries.items() if mid == medication_id]
        for cid in doomed:
            del self._entries[cid]
        if doomed:
            self._matrix = None
        return len(doomed)

    def medication_count(self, medication_id: str) -> int:
        return sum(1 for mid, _ in self._entries.values() if mid == medication_id)

    def vector(self, chunk_id: str) -> Optional[np.ndarray]:
        entry = self._entries.get(chunk_id)
        return self._unit(entry[1]) if entry is not None else None

    def _rebuild(self) -> None:
        self._ids = sorted(self._entries)
        self._medications = [self._entries[cid][0] for cid in self._ids]
        if self._ids:
            self._matrix = np.stack([self._unit(self._entries[cid][1]) for cid in self._ids])
        else:
            self._matrix = np.empty((0, self._dim))

    def top_k(
        self, query: np.ndarray, k: int, medication_id: Optional[str] = None
    ) -> list[tuple[str, float]]:
        """The k most similar entries, similarity descending, ties by chunk_id.

        Returns min(k, filtered size) results; raises EmptyIndex when the
        filter leaves nothing to search.
        """
        if k < 1:
            raise ValueError("k must be >= 1")
        query = np.asarray(query, dtype=np.float64)
        if query.shape != (self._dim,):
            raise DimensionMismatch(
                f"index dimension is {self._dim}, query has shape {query.shape}"
            )
        norm = np.linalg.norm(query)
        if norm == 0.0:
            raise ZeroVector("cannot search with the zero vector")

        if self._matrix is None:
            self._rebuild()
        assert self._matrix is not None

        if medication_id is None:
            ids = self._ids
            matrix = self._matrix
        else:
            keep = [i for i, mid in enumerate(self._medications) if mid == medication_id]
            ids = [self._ids[i] for i in keep]
            matrix = self._matrix[keep]
        if not ids:
            raise EmptyIndex("no entries match the search scope")

        unit_query = query / norm
        # Per-row dot products: bit-identical results for bit-identical rows
        # regardless of row position (blocked matmul kernels do not guarantee
        # that), so exact ties between duplicate vectors stay exact and the
        # chunk_id tie-break below is authoritative.
        sims = np.fromiter(
            (np.dot(row, unit_query) for row in matrix), dtype=np.float64, count=len(ids)
        )
        # ids are sorted ascending, so a stable sort on -sim alone yields the
        # chunk_id tie-break for free.
        order = np.argsort(-sims, kind="stable")[:k]
        return [(ids[i], float(np.clip(sims[i], -1.0, 1.0))) for i in order]

    # -- persistence: packed little-endian float32 + JSON manifest ----------

    def save(self, vectors_path: Path, manifest_path: Path) -> None:
        ids = sorted(self._entries)
        manifest: dict[str, object] = {"dim": self._dim, "entries": {}}
        try:
            with open(vectors_path, "wb") as fh:
                offset = 0
                for cid in ids:
                    medication_id, quantized = self._entries[cid]
                    data = quantized.tobytes()
                    fh.write(data)
                    manifest["entries"][cid] = {
                        "medication_id": medication_id,
                        "offset": offset,
                        "dim": self._dim,
                    }
                    offset += len(data)
            tmp = manifest_path.with_suffix(manifest_path.suffix + ".tmp")
            tmp.write_text(json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8")
            tmp.replace(manifest_path)
        except OSError as exc:
            raise StorageFailure(f"failed to persist index: {exc}") from exc

    @classmethod
    def load(cls, vectors_path: Path, manifest_path: Path) -> "VectorIndex":
        try:
            manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
            blob = vectors_path.read_bytes()
        except OSError as exc:
            raise StorageFailure(f"failed to load index: {exc}") from exc
        dim = int(manifest["dim"])
        index = cls(dim)
        record = struct.calcsize("<f") * dim
        for cid, meta in manifest["entries"].items():
            offset = int(meta["offset"])
            entry_dim = int(meta["dim"])
            if entry_dim != dim:
                raise DimensionMismatch(f"entry {cid} has dim {entry_dim}, index has {dim}")
            vec = np.frombuffer(blob[offset : offset + record], dtype="<f4")
            if vec.size != dim:
                raise StorageFailure(f"vector blob truncated for entry {cid}")
            # Bytes are the canonical quantized form: inject verbatim so a
            # reloaded index is bit-identical to the one that was saved.
            index._set_raw(cid, meta["medication_id"], vec.copy())
        return index
