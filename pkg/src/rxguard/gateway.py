"""Uniform completion contract over pluggable chat-model backends.

The gateway never inspects or repairs response content; it returns backend
text verbatim and archives enough (prompt hash, latency) to replay a whole
experiment offline. Retries apply to transport failures only, with
exponential backoff; auth failures never retry.
"""
from __future__ import annotations

import json
import logging
import os
import re
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Protocol

import httpx

from .errors import RxGuardError, StorageFailure
from .hashing import fnv1a64_hex
from .prompting import Prompt

logger = logging.getLogger(__name__)


class Timeout(RxGuardError):
    """Backend did not answer within the configured timeout."""


class TransportFailure(RxGuardError):
    """Transport-level failure persisted through all retries."""


class AuthFailure(RxGuardError):
    """Backend rejected our credentials; retrying would not help."""


class FixtureMissing(RxGuardError):
    """No recorded completion for this prompt hash."""


@dataclass(frozen=True)
class BackendConfig:
    model_id: str
    endpoint: str = ""
    timeout: float = 60.0
    max_retries: int = 2
    params: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")


@dataclass(frozen=True)
class CompletionRecord:
    prompt_hash: str
    response_text: str
    model_id: str
    latency_ms: float

    def to_dict(self) -> dict[str, object]:
        return {
            "prompt_hash": self.prompt_hash,
            "response_text": self.response_text,
            "model_id": self.model_id,
            "latency_ms": self.latency_ms,
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, object]) -> "CompletionRecord":
        return cls(
            prompt_hash=str(d["prompt_hash"]),
            response_text=str(d["response_text"]),
            model_id=str(d["model_id"]),
            latency_ms=float(d["latency_ms"]),
        )


def prompt_hash(prompt: Prompt) -> str:
    """FNV-1a 64-bit hex digest of the rendered prompt bytes."""
    return fnv1a64_hex(prompt.rendered.encode("utf-8"))


class CompletionBackend(Protocol):
    def complete(self, prompt: Prompt) -> tuple[str, CompletionRecord]: ...


def _api_key_env_name(model_id: str) -> str:
    return "RXGUARD_" + re.sub(r"[^A-Za-z0-9]", "_", model_id).upper() + "_KEY"


class HttpBackend:
    """POST {model, messages} to a chat endpoint, expect {content} back.

    In-flight completions are bounded per backend (default 2) to respect
    hosted rate limits. The optional API key comes from the environment
    variable RXGUARD_<MODEL>_KEY.
    """

    def __init__(
        self,
        config: BackendConfig,
        max_in_flight: int = 2,
        backoff_base: float = 0.5,
        sleeper=time.sleep,
    ) -> None:
        if not config.endpoint:
            raise ValueError("HttpBackend requires an endpoint")
        self.config = config
        self._semaphore = threading.Semaphore(max_in_flight)
        self._backoff_base = backoff_base
        self._sleep = sleeper

    def complete(self, prompt: Prompt) -> tuple[str, CompletionRecord]:
        body: dict[str, object] = {
            "model": self.config.model_id,
            "messages": prompt.messages(),
        }
        # Default parameters unless explicitly configured: no sampling
        # knobs are sent at all.
        body.update(self.config.params)
        headers = {}
        api_key = os.environ.get(_api_key_env_name(self.config.model_id))
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"

        attempts = 1 + self.config.max_retries
        delay = self._backoff_base
        started = time.monotonic()
        last_error: Exception | None = None
        with self._semaphore:
            for attempt in range(attempts):
                try:
                    response = httpx.post(
                        self.config.endpoint,
                        json=body,
                        headers=headers,
                        timeout=self.config.timeout,
                    )
                except httpx.TimeoutException as exc:
                    raise Timeout(
                        f"{self.config.model_id} did not answer within {self.config.timeout}s"
                    ) from exc
                except httpx.TransportError as exc:
                    last_error = exc
                    if attempt + 1 < attempts:
                        self._sleep(delay)
                        delay *= 2
                    continue
                if response.status_code in (401, 403):
                    raise AuthFailure(
                        f"{self.config.model_id} rejected credentials ({response.status_code})"
                    )
                if response.status_code >= 500:
                    last_error = RuntimeError(f"server error {response.status_code}")
                    if attempt + 1 < attempts:
                        self._sleep(delay)
                        delay *= 2
                    continue
                text = self._extract_content(response)
                latency_ms = (time.monotonic() - started) * 1000.0
                record = CompletionRecord(
                    prompt_hash=prompt_hash(prompt),
                    response_text=text,
                    model_id=self.config.model_id,
                    latency_ms=latency_ms,
                )
                return text, record
        raise TransportFailure(
            f"{self.config.model_id} failed after {attempts} attempts: {last_error}"
        )

    @staticmethod
    def _extract_content(response: httpx.Response) -> str:
        # Well-formed responses are passed through verbatim, never retried.
        try:
            payload = response.json()
        except ValueError:
            return response.text
        if isinstance(payload, dict) and isinstance(payload.get("content"), str):
            return payload["content"]
        return response.text


class FixtureStore:
    """JSON-lines archive of completion records, keyed by (model, prompt hash).

    Appends are serialized; a re-recorded prompt hash replaces the earlier
    record on load (later one wins) with a warning.
    """

    def __init__(self, path: Path) -> None:
        self.path = Path(path)
        self._lock = threading.Lock()

    def append(self, record: CompletionRecord) -> None:
        line = json.dumps(record.to_dict(), sort_keys=True)
        try:
            with self._lock:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(line + "\n")
        except OSError as exc:
            raise StorageFailure(f"cannot append fixture to {self.path}: {exc}") from exc

    def load(self) -> dict[tuple[str, str], CompletionRecord]:
        records: dict[tuple[str, str], CompletionRecord] = {}
        if not self.path.exists():
            return records
        try:
            content = self.path.read_text(encoding="utf-8")
        except OSError as exc:
            raise StorageFailure(f"cannot read fixtures from {self.path}: {exc}") from exc
        for line in content.splitlines():
            if not line.strip():
                continue
            record = CompletionRecord.from_dict(json.loads(line))
            key = (record.model_id, record.prompt_hash)
            if key in records:
                logger.warning(
                    "duplicate fixture for model=%s hash=%s; later record wins",
                    record.model_id,
                    record.prompt_hash,
                )
            records[key] = record
        return records


def record_fixture(
    store: FixtureStore, prompt: Prompt, response_text: str, model_id: str, latency_ms: float = 0.0
) -> CompletionRecord:
    """Persist one completion for later replay; content is not validated."""
    record = CompletionRecord(
        prompt_hash=prompt_hash(prompt),
        response_text=response_text,
        model_id=model_id,
        latency_ms=latency_ms,
    )
    store.append(record)
    return record


class RecordedBackend:
    """Replays archived completions; zero network, bit-stable across runs."""

    def __init__(self, model_id: str, store: FixtureStore) -> None:
        self.model_id = model_id
        self._records = store.load()

    def complete(self, prompt: Prompt) -> tuple[str, CompletionRecord]:
        digest = prompt_hash(prompt)
        record = self._records.get((self.model_id, digest))
        if record is None:
            raise FixtureMissing(
                f"no recorded completion for model={self.model_id} prompt_hash={digest}"
            )
        return record.response_text, record
