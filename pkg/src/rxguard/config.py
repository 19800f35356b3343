"""JSON configuration: model backends, embedder, retrieval and chunking knobs.

Relative fixture paths are resolved against the config file's directory so
a checked-in config works from any working directory. API keys are never
stored here; HTTP backends read RXGUARD_<MODEL>_KEY from the environment.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional

from .embedding import EmbeddingProvider, HashEmbedder, HttpEmbeddingProvider
from .errors import RxGuardError
from .gateway import BackendConfig, CompletionBackend, FixtureStore, HttpBackend, RecordedBackend


class ConfigError(RxGuardError):
    """Configuration file is missing or malformed."""


@dataclass(frozen=True)
class ModelConfig:
    model_id: str
    kind: str  # "recorded" | "http"
    endpoint: str = ""
    fixture_file: Optional[Path] = None
    timeout: float = 60.0
    max_retries: int = 2
    params: Mapping[str, object] = field(default_factory=dict)


@dataclass(frozen=True)
class AppConfig:
    retrieval_k: int = 6
    chunk_window: int = 1000
    chunk_overlap: int = 200
    embedder_kind: str = "hash"
    embedder_dim: int = 256
    embedder_endpoint: str = ""
    models: Mapping[str, ModelConfig] = field(default_factory=dict)

    def build_provider(self) -> EmbeddingProvider:
        if self.embedder_kind == "hash":
            return HashEmbedder(dim=self.embedder_dim)
        if self.embedder_kind == "http":
            if not self.embedder_endpoint:
                raise ConfigError("http embedder requires an endpoint")
            return HttpEmbeddingProvider(self.embedder_endpoint)
        raise ConfigError(f"unknown embedder kind {self.embedder_kind!r}")

    def build_backends(self) -> dict[str, CompletionBackend]:
        backends: dict[str, CompletionBackend] = {}
        for model_id, model in self.models.items():
            if model.kind == "recorded":
                if model.fixture_file is None:
                    raise ConfigError(f"recorded model {model_id!r} needs fixture_file")
                backends[model_id] = RecordedBackend(model_id, FixtureStore(model.fixture_file))
            elif model.kind == "http":
                backends[model_id] = HttpBackend(
                    BackendConfig(
                        model_id=model_id,
                        endpoint=model.endpoint,
                        timeout=model.timeout,
                        max_retries=model.max_retries,
                        params=dict(model.params),
                    )
                )
            else:
                raise ConfigError(f"unknown backend kind {model.kind!r} for model {model_id!r}")
        return backends


def load_config(path: Path | str) -> AppConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc

    base = path.parent
    models: dict[str, ModelConfig] = {}
    for model_id, spec in raw.get("models", {}).items():
        fixture = spec.get("fixture_file")
        models[model_id] = ModelConfig(
            model_id=model_id,
            kind=spec.get("kind", "http"),
            endpoint=spec.get("endpoint", ""),
            fixture_file=(base / fixture).resolve() if fixture else None,
            timeout=float(spec.get("timeout", 60.0)),
            max_retries=int(spec.get("max_retries", 2)),
            params=spec.get("params", {}),
        )
    embedder = raw.get("embedder", {})
    return AppConfig(
        retrieval_k=int(raw.get("retrieval_k", 6)),
        chunk_window=int(raw.get("chunk_window", 1000)),
        chunk_overlap=int(raw.get("chunk_overlap", 200)),
        embedder_kind=embedder.get("kind", "hash"),
        embedder_dim=int(embedder.get("dim", 256)),
        embedder_endpoint=embedder.get("endpoint", ""),
        models=models,
    )
