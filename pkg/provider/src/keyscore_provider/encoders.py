"""Phrase-to-token-embedding encoders.

Every encoder obeys one contract: deterministic output for a fixed
(model_id, phrase), one unit-norm vector per kernel token, consistent
dimension. Two families:

* ``hash-<dim>``: offline deterministic encoders. Tokens are lowercase
  whitespace splits; each token's vector is a seeded Gaussian draw from
  blake2b(model_id, token), L2-normalized. No weights needed, so the
  service contract stays testable anywhere.
* ``hf:<checkpoint>``: real contextual embeddings through transformers
  (evaluation mode, no dropout, special tokens dropped, normalized
  server-side). Requires the checkpoint weights to be available locally
  or downloadable.

Per-model baseline-rescaling constants ship here as configuration for the
consumer; they are never applied on this side.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np


class EncoderError(Exception):
    pass


class UnknownModelError(EncoderError):
    pass


@dataclass(frozen=True)
class ModelInfo:
    model_id: str
    dimension: int
    rescale_baseline: float


class HashEncoder:
    """Deterministic per-token unit vectors from a seeded projection."""

    def __init__(self, model_id: str, dimension: int,
                 rescale_baseline: float = 0.0):
        if dimension < 2:
            raise EncoderError(f"dimension must be >= 2, got {dimension}")
        self.model_id = model_id
        self.dimension = dimension
        self.rescale_baseline = rescale_baseline
        self._memo: dict[str, np.ndarray] = {}

    def info(self) -> ModelInfo:
        return ModelInfo(self.model_id, self.dimension, self.rescale_baseline)

    @staticmethod
    def tokenize(phrase: str) -> list[str]:
        return phrase.lower().split()

    def _token_vector(self, token: str) -> np.ndarray:
        vec = self._memo.get(token)
        if vec is None:
            digest = hashlib.blake2b(
                f"{self.model_id}\x00{token}".encode("utf-8"),
                digest_size=8).digest()
            rng = np.random.default_rng(int.from_bytes(digest, "big"))
            raw = rng.standard_normal(self.dimension)
            vec = raw / np.linalg.norm(raw)
            self._memo[token] = vec
        return vec

    def encode(self, phrase: str) -> tuple[list[str], np.ndarray]:
        tokens = self.tokenize(phrase)
        if not tokens:
            raise EncoderError(f"phrase has no tokens: {phrase!r}")
        vectors = np.stack([self._token_vector(t) for t in tokens])
        return tokens, vectors


class HfEncoder:
    """Contextual token embeddings from a transformers checkpoint."""

    def __init__(self, checkpoint: str, rescale_baseline: float = 0.0):
        import torch
        from transformers import AutoModel, AutoTokenizer

        self._torch = torch
        self.model_id = f"hf:{checkpoint}"
        self.rescale_baseline = rescale_baseline
        self._tokenizer = AutoTokenizer.from_pretrained(checkpoint)
        self._model = AutoModel.from_pretrained(checkpoint)
        self._model.eval()
        self.dimension = int(self._model.config.hidden_size)

    def info(self) -> ModelInfo:
        return ModelInfo(self.model_id, self.dimension, self.rescale_baseline)

    def encode(self, phrase: str) -> tuple[list[str], np.ndarray]:
        torch = self._torch
        enc = self._tokenizer(phrase, return_tensors="pt",
                              return_special_tokens_mask=True)
        special = enc.pop("special_tokens_mask")[0].bool()
        with torch.no_grad():
            hidden = self._model(**enc).last_hidden_state[0]
        keep = ~special
        if not bool(keep.any()):
            raise EncoderError(f"phrase has no kernel tokens: {phrase!r}")
        vectors = hidden[keep]
        vectors = torch.nn.functional.normalize(vectors, p=2, dim=-1)
        ids = enc["input_ids"][0][keep]
        tokens = self._tokenizer.convert_ids_to_tokens(ids.tolist())
        return tokens, vectors.double().numpy()


DEFAULT_MODELS = {
    "hash-64": (64, 0.0),
    "hash-256": (256, 0.0),
    "hash-384": (384, 0.0),
}
DEFAULT_MODEL_ID = "hash-256"


class EncoderRegistry:
    """Lazily instantiated encoders keyed by model_id."""

    def __init__(self, models: dict[str, tuple[int, float]] | None = None):
        self._specs = dict(DEFAULT_MODELS if models is None else models)
        self._encoders: dict[str, object] = {}

    def model_ids(self) -> list[str]:
        return sorted(self._specs)

    def get(self, model_id: str):
        enc = self._encoders.get(model_id)
        if enc is not None:
            return enc
        if model_id in self._specs:
            dim, baseline = self._specs[model_id]
            enc = HashEncoder(model_id, dim, baseline)
        elif model_id.startswith("hf:"):
            enc = HfEncoder(model_id[3:])
        else:
            raise UnknownModelError(f"unknown model_id {model_id!r}; "
                                    f"known: {self.model_ids()} or hf:<checkpoint>")
        self._encoders[model_id] = enc
        return enc
