"""Embedding sources for the embedding-greedy kernel.

Two interchangeable providers sit behind one protocol:

  * CacheEmbeddingProvider reads a precomputed JSONL cache, one object per
    line: {"phrase": str, "model_id": str, "tokens": [str],
    "vectors": [[float, ...], ...]};
  * HttpEmbeddingProvider calls a sidecar service:
    POST {base_url}/embed with {"phrases": [str], "model_id": str} and
    expects {"dimension": int, "results": [{"phrase", "tokens", "vectors"}]}.

Vectors must arrive unit-normalized (the provider's contract); they are
validated, never renormalized, on this side.
"""

from __future__ import annotations

import json
import os
import threading
from typing import Iterable, Protocol

import numpy as np

from .errors import MissingEmbeddingError, ValidationError
from .matching import TokenEmbeddingSet
from .textnorm import NormalizedPhrase

EMBED_URL_ENV = "KEYSCORE_EMBED_URL"


class EmbeddingProvider(Protocol):
    def embed(self, phrase: NormalizedPhrase) -> TokenEmbeddingSet: ...


def _lookup_keys(phrase: NormalizedPhrase) -> list[str]:
    # raw form first, then the normalized fallbacks
    return [phrase.original.raw,
            " ".join(phrase.original.tokens),
            " ".join(phrase.stems)]


class CacheEmbeddingProvider:
    """Embeddings from a prebuilt cache file, keyed by phrase string."""

    def __init__(self, path, model_id: str | None = None):
        self.path = str(path)
        self.model_id = model_id
        self._sets: dict[str, TokenEmbeddingSet] = {}
        seen_models = set()
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ValidationError(
                        f"{path}:{lineno}: invalid JSON: {exc}") from exc
                entry_model = obj.get("model_id", "")
                if model_id is not None and entry_model != model_id:
                    continue
                seen_models.add(entry_model)
                phrase = obj["phrase"]
                vectors = np.asarray(obj["vectors"], dtype=np.float64)
                try:
                    emb = TokenEmbeddingSet(tuple(obj["tokens"]), vectors)
                except ValidationError as exc:
                    raise ValidationError(f"{path}:{lineno}: {exc}") from exc
                self._sets.setdefault(phrase, emb)
        if model_id is None and len(seen_models) > 1:
            raise ValidationError(
                f"{path}: cache mixes model_ids {sorted(seen_models)}; "
                "pass model_id to select one")

    def __len__(self) -> int:
        return len(self._sets)

    def embed(self, phrase: NormalizedPhrase) -> TokenEmbeddingSet:
        for key in _lookup_keys(phrase):
            emb = self._sets.get(key)
            if emb is not None:
                return emb
        raise MissingEmbeddingError(
            f"no cached embedding for phrase {phrase.original.raw!r} in {self.path}")


class HttpEmbeddingProvider:
    """Embeddings from the sidecar HTTP service, memoized per phrase."""

    def __init__(self, base_url: str, model_id: str, batch_size: int = 64,
                 timeout: float = 30.0):
        import requests

        self.base_url = base_url.rstrip("/")
        self.model_id = model_id
        self.batch_size = batch_size
        self.timeout = timeout
        self._session = requests.Session()
        self._memo: dict[str, TokenEmbeddingSet] = {}
        self._lock = threading.Lock()

    def _request(self, phrases: list[str]) -> None:
        resp = self._session.post(
            f"{self.base_url}/embed",
            json={"phrases": phrases, "model_id": self.model_id},
            timeout=self.timeout)
        if resp.status_code != 200:
            raise ValidationError(
                f"embedding service returned {resp.status_code}: {resp.text[:200]}")
        payload = resp.json()
        for entry in payload["results"]:
            emb = TokenEmbeddingSet(
                tuple(entry["tokens"]),
                np.asarray(entry["vectors"], dtype=np.float64))
            self._memo[entry["phrase"]] = emb

    def prefetch(self, phrases: Iterable[NormalizedPhrase]) -> None:
        """Batch-embed any phrases not yet memoized."""
        with self._lock:
            todo = []
            for p in phrases:
                raw = p.original.raw
                if raw not in self._memo and raw not in todo:
                    todo.append(raw)
            for i in range(0, len(todo), self.batch_size):
                self._request(todo[i:i + self.batch_size])

    def embed(self, phrase: NormalizedPhrase) -> TokenEmbeddingSet:
        raw = phrase.original.raw
        with self._lock:
            emb = self._memo.get(raw)
            if emb is None:
                self._request([raw])
                emb = self._memo.get(raw)
        if emb is None:
            raise MissingEmbeddingError(
                f"embedding service returned no vectors for {raw!r}")
        return emb


def resolve_provider(spec: str | None, model_id: str | None = None):
    """Build a provider from --embeddings (cache path or service URL).

    KEYSCORE_EMBED_URL, when set, overrides any service URL.
    """
    env_url = os.environ.get(EMBED_URL_ENV)
    if spec is None and env_url is None:
        return None
    is_url = spec is not None and spec.startswith(("http://", "https://"))
    if env_url and (spec is None or is_url):
        spec, is_url = env_url, True
    if is_url:
        if not model_id:
            raise ValidationError("--model-id is required with an embedding service URL")
        return HttpEmbeddingProvider(spec, model_id)
    return CacheEmbeddingProvider(spec, model_id)
