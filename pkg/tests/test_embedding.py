from __future__ import annotations

import threading

import numpy as np
import pytest

from rxguard.embedding import (
    EmptyText,
    HashEmbedder,
    HttpEmbeddingProvider,
    ProviderUnavailable,
    embed,
    embed_many,
)


def fnv1a64_oracle(data: bytes) -> int:
    """Independent FNV-1a-64 (unrolled fold, no library sharing)."""
    acc = 14695981039346656037
    for b in data:
        acc = ((acc ^ b) * 1099511628211) % (1 << 64)
    return acc


class TestHashEmbedder:
    def test_deterministic(self):
        provider = HashEmbedder()
        a = embed("warfarin", provider)
        b = embed("warfarin", provider)
        assert np.array_equal(a, b)

    def test_empty_text_rejected(self):
        with pytest.raises(EmptyText):
            embed("", HashEmbedder())
        with pytest.raises(EmptyText):
            embed("   \t ", HashEmbedder())
        with pytest.raises(EmptyText):
            embed("!!! ---", HashEmbedder())  # no alphanumeric tokens

    def test_known_token_buckets(self):
        provider = HashEmbedder()
        vec = provider.embed_text("warfarin dose")
        expected = np.zeros(256)
        expected[fnv1a64_oracle(b"warfarin") % 256] += 1
        expected[fnv1a64_oracle(b"dose") % 256] += 1
        expected /= np.linalg.norm(expected)
        assert np.allclose(vec, expected, atol=0)
        assert np.count_nonzero(vec) == 2

    def test_tokenization_lowercases_and_splits_on_non_alnum(self):
        provider = HashEmbedder()
        assert np.array_equal(
            provider.embed_text("Warfarin, DOSE!"), provider.embed_text("warfarin dose")
        )

    def test_repeated_tokens_accumulate(self):
        provider = HashEmbedder()
        vec = provider.embed_text("dose dose dose")
        assert np.count_nonzero(vec) == 1
        assert vec[fnv1a64_oracle(b"dose") % 256] == pytest.approx(1.0)

    def test_normalized(self):
        vec = HashEmbedder().embed_text("the quick brown fox jumps over the lazy dog")
        assert np.linalg.norm(vec) == pytest.approx(1.0, abs=1e-12)

    def test_dim(self):
        assert HashEmbedder().dim == 256
        assert HashEmbedder(dim=64).embed_text("abc").shape == (64,)

    def test_embed_many_preserves_order(self):
        provider = HashEmbedder()
        texts = [f"token{i}" for i in range(10)]
        vectors = embed_many(texts, provider)
        for text, vec in zip(texts, vectors):
            assert np.array_equal(vec, provider.embed_text(text))


class _FakeTransport:
    """Swap in for httpx.post without a network."""

    def __init__(self, responses):
        self.responses = list(responses)
        self.calls = 0
        self.lock = threading.Lock()

    def __call__(self, url, json=None, timeout=None):
        with self.lock:
            self.calls += 1
            action = self.responses.pop(0)
        if isinstance(action, Exception):
            raise action
        return action


class _Resp:
    def __init__(self, payload, status=200):
        self._payload = payload
        self.status_code = status

    def raise_for_status(self):
        import httpx

        if self.status_code >= 400:
            raise httpx.HTTPStatusError("boom", request=None, response=None)

    def json(self):
        return self._payload


class TestHttpProvider:
    def test_pins_dimension_and_normalizes(self, monkeypatch):
        provider = HttpEmbeddingProvider("http://embed.test", sleeper=lambda _s: None)
        fake = _FakeTransport([_Resp({"embedding": [3.0, 4.0]}), _Resp({"embedding": [1.0, 0.0]})])
        monkeypatch.setattr("rxguard.embedding.httpx.post", fake)
        vec = provider.embed_text("hello")
        assert provider.dim == 2
        assert np.allclose(vec, [0.6, 0.8])
        provider.embed_text("again")

    def test_dimension_drift_fails(self, monkeypatch):
        provider = HttpEmbeddingProvider("http://embed.test", sleeper=lambda _s: None)
        fake = _FakeTransport([_Resp([1.0, 0.0]), _Resp([1.0, 0.0, 0.0])])
        monkeypatch.setattr("rxguard.embedding.httpx.post", fake)
        provider.embed_text("a")
        with pytest.raises(ProviderUnavailable):
            provider.embed_text("b")

    def test_retries_then_unavailable(self, monkeypatch):
        import httpx

        sleeps = []
        provider = HttpEmbeddingProvider(
            "http://embed.test", max_retries=2, sleeper=sleeps.append
        )
        fake = _FakeTransport(
            [httpx.ConnectError("down"), httpx.ConnectError("down"), httpx.ConnectError("down")]
        )
        monkeypatch.setattr("rxguard.embedding.httpx.post", fake)
        with pytest.raises(ProviderUnavailable):
            provider.embed_text("a")
        assert fake.calls == 3  # 1 + max_retries
        assert sleeps == [0.5, 1.0]  # exponential backoff

    def test_empty_text_short_circuits(self, monkeypatch):
        provider = HttpEmbeddingProvider("http://embed.test")
        fake = _FakeTransport([])
        monkeypatch.setattr("rxguard.embedding.httpx.post", fake)
        with pytest.raises(EmptyText):
            provider.embed_text("  ")
        assert fake.calls == 0
