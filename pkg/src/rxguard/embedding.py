"""Embedding provider contract and implementations.

Two providers: a deterministic hashing embedder for tests and offline runs
(bit-exact across platforms, no ML dependency), and an HTTP provider for a
hosted embedding endpoint whose dimension is learned at first call and
pinned afterwards.
"""
from __future__ import annotations

import re
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Protocol, Sequence

import httpx
import numpy as np

from .errors import RxGuardError
from .hashing import fnv1a64


class EmptyText(RxGuardError):
    """Text was empty (or produced no tokens) after trimming."""


class ProviderUnavailable(RxGuardError):
    """Embedding endpoint unreachable after retries."""


class EmbeddingProvider(Protocol):
    @property
    def dim(self) -> int: ...

    def embed_text(self, text: str) -> np.ndarray: ...


_TOKEN_RE = re.compile(r"[a-z0-9]+")


class HashEmbedder:
    """Deterministic bag-of-tokens embedder.

    Tokenizes by lowercasing and splitting on non-alphanumeric runs, buckets
    each token by its FNV-1a 64-bit hash mod the dimension, counts, then
    L2-normalizes. Fixed 256 dimensions by default; values are bit-exact
    given equal input text.
    """

    def __init__(self, dim: int = 256) -> None:
        self._dim = dim

    @property
    def dim(self) -> int:
        return self._dim

    def embed_text(self, text: str) -> np.ndarray:
        tokens = _TOKEN_RE.findall(text.lower())
        if not tokens:
            raise EmptyText("no tokens to embed")
        vec = np.zeros(self._dim, dtype=np.float64)
        for token in tokens:
            vec[fnv1a64(token.encode("utf-8")) % self._dim] += 1.0
        return vec / np.linalg.norm(vec)


class HttpEmbeddingProvider:
    """Calls ``POST endpoint {"text": ...}`` and expects a decimal array back,
    either bare or under an "embedding" key. The vector dimension is pinned on
    the first successful call; later mismatches are transport failures."""

    def __init__(
        self,
        endpoint: str,
        timeout: float = 30.0,
        max_retries: int = 2,
        backoff_base: float = 0.5,
        sleeper=time.sleep,
    ) -> None:
        self.endpoint = endpoint
        self.timeout = timeout
        self.max_retries = max_retries
        self._backoff_base = backoff_base
        self._sleep = sleeper
        self._dim: int | None = None
        self._lock = threading.Lock()

    @property
    def dim(self) -> int:
        if self._dim is None:
            raise ProviderUnavailable("dimension not pinned yet; embed a text first")
        return self._dim

    def embed_text(self, text: str) -> np.ndarray:
        if not text.strip():
            raise EmptyText("cannot embed empty text")
        payload = self._request({"text": text})
        values = payload.get("embedding") if isinstance(payload, dict) else payload
        if not isinstance(values, list) or not values:
            raise ProviderUnavailable(f"malformed embedding response from {self.endpoint}")
        vec = np.asarray(values, dtype=np.float64)
        if not np.all(np.isfinite(vec)):
            raise ProviderUnavailable("embedding response contains non-finite values")
        with self._lock:
            if self._dim is None:
                self._dim = vec.size
        if vec.size != self._dim:
            raise ProviderUnavailable(
                f"provider dimension drifted: pinned {self._dim}, got {vec.size}"
            )
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            raise ProviderUnavailable("embedding response is the zero vector")
        return vec / norm

    def _request(self, body: dict):
        attempts = 1 + self.max_retries
        delay = self._backoff_base
        last_error: Exception | None = None
        for attempt in range(attempts):
            try:
                response = httpx.post(self.endpoint, json=body, timeout=self.timeout)
                response.raise_for_status()
                return response.json()
            except (httpx.TransportError, httpx.HTTPStatusError) as exc:
                last_error = exc
                if attempt + 1 < attempts:
                    self._sleep(delay)
                    delay *= 2
        raise ProviderUnavailable(f"embedding endpoint failed after {attempts} attempts: {last_error}")


def embed(text: str, provider: EmbeddingProvider) -> np.ndarray:
    """Embed one text; L2-normalized vector of the provider's dimension."""
    if not text.strip():
        raise EmptyText("cannot embed empty text")
    return provider.embed_text(text)


def embed_many(
    texts: Sequence[str], provider: EmbeddingProvider, max_in_flight: int = 4
) -> list[np.ndarray]:
    """Embed a batch with bounded parallelism (results in input order)."""
    with ThreadPoolExecutor(max_workers=max_in_flight) as pool:
        return list(pool.map(lambda t: embed(t, provider), texts))
