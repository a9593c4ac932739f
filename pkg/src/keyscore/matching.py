"""Phrase-pair similarity kernels and their wrappers.

Three kernels, all mapping a pair of phrases into [0, 1]:

  * exact: 1 iff the stemmed token sequences are equal;
  * kmr: 1 - TER, where TER is the word-level edit distance divided by the
    longer phrase's length (the max-length denominator is exactly what
    padding the shorter phrase achieves: pads turn deletions into
    substitutions at equal cost while keeping TER in [0, 1]);
  * embedding-greedy: greedy max dot-product matching over unit-norm token
    embedding sets, F of the two directional means, optionally baseline
    rescaled via (s - b) / (1 - b).

A kernel value below the configured threshold is set to 0 so low-scoring
pairs cannot inflate set-level scores.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Sequence

import numpy as np

from ._kernels import levenshtein, pairwise_levenshtein
from .errors import MissingEmbeddingError, ValidationError
from .textnorm import NormalizedPhrase

if TYPE_CHECKING:
    from .embeddings import EmbeddingProvider

DEFAULT_THRESHOLD = 0.4


class ScoreKind(Enum):
    EXACT = "exact"
    KMR = "kmr"
    EMBEDDING_GREEDY = "embedding_greedy"


@dataclass(frozen=True)
class ScoreFunction:
    """Kernel choice plus threshold / rescaling configuration."""

    kind: ScoreKind
    threshold: float = DEFAULT_THRESHOLD
    rescale_baseline: float | None = None
    threshold_after_rescale: bool = True

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise ValidationError(f"threshold {self.threshold} outside [0, 1]")
        if self.rescale_baseline is not None:
            if self.kind is not ScoreKind.EMBEDDING_GREEDY:
                raise ValidationError(
                    "rescale_baseline only applies to the embedding-greedy kernel")
            if not 0.0 <= self.rescale_baseline < 1.0:
                raise ValidationError(
                    f"rescale_baseline {self.rescale_baseline} outside [0, 1)")


EXACT = ScoreFunction(ScoreKind.EXACT)
KMR = ScoreFunction(ScoreKind.KMR)


@dataclass(frozen=True, eq=False)
class TokenEmbeddingSet:
    """Ordered unit-norm vectors, one per kernel token of a phrase."""

    key: tuple[str, ...]
    vectors: np.ndarray

    def __post_init__(self):
        v = self.vectors
        if v.ndim != 2 or v.shape[0] == 0 or v.shape[1] == 0:
            raise ValidationError(
                f"embedding set for {self.key!r} must be a non-empty 2-D array")
        norms = np.linalg.norm(v, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-6):
            worst = float(np.max(np.abs(norms - 1.0)))
            raise ValidationError(
                f"embedding vectors for {self.key!r} are not unit norm "
                f"(max deviation {worst:.2e})")

    @property
    def dimension(self) -> int:
        return int(self.vectors.shape[1])


def exact_score(a: NormalizedPhrase, b: NormalizedPhrase) -> float:
    return 1.0 if a.stems == b.stems else 0.0


def _encode(seqs: Sequence[Sequence[str]], vocab: dict[str, int]) -> list[np.ndarray]:
    out = []
    for seq in seqs:
        ids = np.empty(len(seq), dtype=np.int64)
        for i, tok in enumerate(seq):
            ids[i] = vocab.setdefault(tok, len(vocab))
        out.append(ids)
    return out


def edit_distance(a: Sequence[str], b: Sequence[str]) -> int:
    """Word-level Levenshtein distance (unit insert/delete/substitute)."""
    vocab: dict[str, int] = {}
    ea, eb = _encode([a, b], vocab)
    return levenshtein(ea, eb)


def kmr(a: NormalizedPhrase, b: NormalizedPhrase) -> float:
    """1 - TER over stemmed tokens with max-length normalization."""
    la, lb = len(a.stems), len(b.stems)
    if la == 0 or lb == 0:
        raise ValidationError("kmr requires non-empty phrases")
    return 1.0 - edit_distance(a.stems, b.stems) / max(la, lb)


def _rescale(value: float, baseline: float | None) -> float:
    if baseline is not None:
        value = (value - baseline) / (1.0 - baseline)
    return min(1.0, max(0.0, value))


def embedding_greedy_score(a: TokenEmbeddingSet, b: TokenEmbeddingSet,
                           rescale_baseline: float | None = None) -> float:
    """Greedy max-matching F over token dot-products, rescaled and clamped."""
    if a.dimension != b.dimension:
        raise ValidationError(
            f"embedding dimension mismatch: {a.dimension} vs {b.dimension}")
    sim = a.vectors @ b.vectors.T
    p = float(sim.max(axis=1).mean())
    r = float(sim.max(axis=0).mean())
    f = 0.0 if p + r == 0.0 else 2.0 * p * r / (p + r)
    return _rescale(f, rescale_baseline)


def apply_score(score_fn: ScoreFunction, a: NormalizedPhrase, b: NormalizedPhrase,
                embeddings: "EmbeddingProvider | None" = None) -> float:
    """Kernel value for (a, b) after rescaling and thresholding."""
    if score_fn.kind is ScoreKind.EXACT:
        value = exact_score(a, b)
    elif score_fn.kind is ScoreKind.KMR:
        value = kmr(a, b)
    else:
        if embeddings is None:
            raise MissingEmbeddingError(
                f"embedding provider required to score {a.original.raw!r}")
        ea = embeddings.embed(a)
        eb = embeddings.embed(b)
        if score_fn.threshold_after_rescale:
            value = embedding_greedy_score(ea, eb, score_fn.rescale_baseline)
        else:
            value = embedding_greedy_score(ea, eb, None)
            if value < score_fn.threshold:
                return 0.0
            return _rescale(value, score_fn.rescale_baseline)
    return value if value >= score_fn.threshold else 0.0


def score_matrix(score_fn: ScoreFunction,
                 preds: Sequence[NormalizedPhrase],
                 golds: Sequence[NormalizedPhrase],
                 embeddings: "EmbeddingProvider | None" = None) -> np.ndarray:
    """All pred x gold kernel values (thresholds applied), shape (|P|, |G|)."""
    np_, ng = len(preds), len(golds)
    if np_ == 0 or ng == 0:
        return np.zeros((np_, ng), dtype=np.float64)

    if score_fn.kind is ScoreKind.EXACT:
        keys: dict[tuple[str, ...], int] = {}
        pa = np.array([keys.setdefault(p.stems, len(keys)) for p in preds])
        ga = np.array([keys.setdefault(g.stems, len(keys)) for g in golds])
        values = (pa[:, None] == ga[None, :]).astype(np.float64)
    elif score_fn.kind is ScoreKind.KMR:
        vocab: dict[str, int] = {}
        enc = _encode([p.stems for p in preds] + [g.stems for g in golds], vocab)
        flat_p = np.concatenate([np.zeros(0, np.int64)] + enc[:np_])
        off_p = np.cumsum([0] + [e.size for e in enc[:np_]]).astype(np.int64)
        flat_g = np.concatenate([np.zeros(0, np.int64)] + enc[np_:])
        off_g = np.cumsum([0] + [e.size for e in enc[np_:]]).astype(np.int64)
        dist = pairwise_levenshtein(flat_p, off_p, flat_g, off_g)
        len_p = np.array([len(p.stems) for p in preds], dtype=np.int64)
        len_g = np.array([len(g.stems) for g in golds], dtype=np.int64)
        maxlen = np.maximum(len_p[:, None], len_g[None, :])
        values = 1.0 - dist / maxlen
    else:
        values = np.empty((np_, ng), dtype=np.float64)
        for i, p in enumerate(preds):
            for j, g in enumerate(golds):
                values[i, j] = apply_score(score_fn, p, g, embeddings)
        return values

    values[values < score_fn.threshold] = 0.0
    return values
