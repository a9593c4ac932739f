"""Keyphrase-level model confidence from token probability traces.

A keyphrase span's perplexity is the inverse geometric mean of its tokens'
conditional probabilities:

    kpp(span) = (prod_i p_i) ** (-1/m),   m = span length

computed in log space for stability. Confidence is its inverse, the plain
geometric mean, in (0, 1]. Corpus-level summaries cover the perplexity
histogram per presence split and per-position probability statistics for
the first few tokens of each keyphrase.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable

import numpy as np

from .errors import ValidationError
from .textnorm import (NormalizedPhrase, PresenceLabel, classify_presence,
                       dedup_indices, normalize)

if TYPE_CHECKING:
    from .corpus import Corpus, Document, KeyphraseSpan, PredictionRecord, TokenTrace

logger = logging.getLogger(__name__)

DEFAULT_KPP_RANGE = (1.0, 5.0)


def _span_logprobs(trace: "TokenTrace", span: "KeyphraseSpan") -> np.ndarray:
    if span.end >= len(trace):
        raise ValidationError(
            f"span ({span.start}, {span.end}) exceeds trace length {len(trace)}")
    for i in range(span.start, span.end + 1):
        if trace.special_mask[i]:
            raise ValidationError(
                f"span ({span.start}, {span.end}) touches special token at index {i}")
        p = trace.probs[i]
        if math.isnan(p) or p <= 0.0:
            raise ValidationError(f"probability {p!r} at index {i} outside (0, 1]")
    return np.log(np.asarray(trace.probs[span.start:span.end + 1], dtype=np.float64))


def kpp(trace: "TokenTrace", span: "KeyphraseSpan") -> float:
    """Keyphrase perplexity of the span; >= 1 whenever all probs <= 1."""
    return float(math.exp(-_span_logprobs(trace, span).mean()))


def confidence(trace: "TokenTrace", span: "KeyphraseSpan") -> float:
    """Geometric mean of the span's probabilities (= 1/kpp), in (0, 1]."""
    return float(math.exp(_span_logprobs(trace, span).mean()))


@dataclass(frozen=True)
class KeyphraseConfidence:
    span: "KeyphraseSpan"
    kpp: float
    confidence: float
    presence: PresenceLabel
    phrase: NormalizedPhrase


def record_confidences(record: "PredictionRecord", doc: "Document",
                       ) -> list[KeyphraseConfidence]:
    """Per-keyphrase confidence for a prediction record.

    Predictions are deduplicated by stemmed form first (the evaluation
    protocol's convention); the first occurrence keeps its span.
    """
    kept = dedup_indices(p.stemmed for p in record.phrases)
    out = []
    for i in kept:
        span = record.spans[i]
        phrase = normalize(record.phrases[i])
        out.append(KeyphraseConfidence(
            span=span,
            kpp=kpp(record.trace, span),
            confidence=confidence(record.trace, span),
            presence=classify_presence(phrase, doc),
            phrase=phrase,
        ))
    return out


def iter_corpus_confidences(corpus: "Corpus",
                            ) -> Iterable[tuple[str, KeyphraseConfidence]]:
    for doc, record in corpus.pairs():
        for kc in record_confidences(record, doc):
            yield doc.doc_id, kc


@dataclass
class KppHistogram:
    """Fixed-width perplexity histogram with an overflow bucket."""

    lo: float
    bin_width: float
    counts: list[int]
    overflow: int
    median: float | None
    n: int

    def bin_edges(self) -> list[float]:
        return [self.lo + i * self.bin_width for i in range(len(self.counts) + 1)]

    def to_dict(self) -> dict:
        return {"lo": self.lo, "bin_width": self.bin_width, "counts": self.counts,
                "overflow": self.overflow, "median": self.median, "n": self.n}


def _histogram(values: list[float], lo: float, hi: float, width: float) -> KppHistogram:
    nbins = int(round((hi - lo) / width))
    counts = [0] * nbins
    overflow = 0
    for v in values:
        # nudge values sitting on a bin edge into the upper bin despite FP error
        idx = math.floor((v - lo) / width + 1e-9)
        if idx >= nbins:
            overflow += 1
        elif idx >= 0:
            counts[idx] += 1
        else:
            counts[0] += 1
    median = float(np.median(values)) if values else None
    return KppHistogram(lo=lo, bin_width=width, counts=counts,
                        overflow=overflow, median=median, n=len(values))


def kpp_histogram(corpus: "Corpus",
                  presence_filter: PresenceLabel | None = None,
                  bin_width: float = 0.1,
                  kpp_range: tuple[float, float] = DEFAULT_KPP_RANGE,
                  ) -> dict[str, KppHistogram]:
    """Histogram of keyphrase perplexities, split by presence.

    Returns one histogram per split ("present"/"absent", or a single split
    when a filter is given). Empty splits carry n=0 and median None.
    """
    lo, hi = kpp_range
    splits = ([presence_filter] if presence_filter is not None
              else [PresenceLabel.PRESENT, PresenceLabel.ABSENT])
    values: dict[PresenceLabel, list[float]] = {s: [] for s in splits}
    for _, kc in iter_corpus_confidences(corpus):
        if kc.presence in values:
            values[kc.presence].append(kc.kpp)
    return {s.value: _histogram(values[s], lo, hi, bin_width) for s in splits}


@dataclass(frozen=True)
class PositionStats:
    """Boxplot summary of token probabilities at one relative position."""

    position: int
    q1: float
    median: float
    q3: float
    low: float
    high: float
    count: int

    def to_dict(self) -> dict:
        return {"position": self.position, "q1": self.q1, "median": self.median,
                "q3": self.q3, "low": self.low, "high": self.high,
                "count": self.count}


def _boxplot_stats(position: int, pool: list[float]) -> PositionStats:
    arr = np.asarray(pool, dtype=np.float64)
    q1, med, q3 = (float(q) for q in np.quantile(arr, [0.25, 0.5, 0.75]))
    iqr = q3 - q1
    low = max(float(arr.min()), q1 - 1.5 * iqr)
    high = min(float(arr.max()), q3 + 1.5 * iqr)
    return PositionStats(position=position, q1=q1, median=med, q3=q3,
                         low=low, high=high, count=len(pool))


def position_stats(corpus: "Corpus", n_positions: int = 5,
                   presence_filter: PresenceLabel | None = None,
                   ) -> list[PositionStats]:
    """Quartiles and 1.5*IQR whiskers of p(w_i | .) pooled by the token's
    relative position (1-based) within its keyphrase.

    Positions with no samples are omitted (logged at debug level).
    """
    pools: list[list[float]] = [[] for _ in range(n_positions)]
    for doc, record in corpus.pairs():
        for kc in record_confidences(record, doc):
            if presence_filter is not None and kc.presence is not presence_filter:
                continue
            span = kc.span
            for rel in range(min(span.length, n_positions)):
                pools[rel].append(record.trace.probs[span.start + rel])
    out = []
    for i, pool in enumerate(pools):
        if not pool:
            logger.debug("position %d has no samples; omitted", i + 1)
            continue
        out.append(_boxplot_stats(i + 1, pool))
    return out
