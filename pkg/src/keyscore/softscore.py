"""Set-to-set soft F-scores over keyphrase sets.

Given prediction set P, gold set G and a phrase-pair kernel ``score``:

    P_score = (1 / effective_count) * sum_{p in P} max_{g in G} score(p, g)
    R_score = (1 / |G|)             * sum_{g in G} max_{p in P} score(p, g)
    F_score = 2 * P_score * R_score / (P_score + R_score)   (0 when P+R = 0)

With the exact kernel this reduces bit-for-bit to the standard F1. The @k
selection keeps the first k predictions in generation order; short lists
are padded by count (denominator inflation - mathematically identical to
appending never-matching junk phrases).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

from .errors import ValidationError
from .matching import EXACT, ScoreFunction, score_matrix
from .textnorm import NormalizedPhrase, PresenceLabel, classify_presence, dedup, normalize

if TYPE_CHECKING:
    from .corpus import Document, PredictionRecord
    from .embeddings import EmbeddingProvider


@dataclass(frozen=True)
class Selection:
    """Prediction selection policy: k=None selects all (@M), else top-k (@k)."""

    k: int | None = None

    def __post_init__(self):
        if self.k is not None and self.k < 1:
            raise ValidationError(f"selection k must be >= 1, got {self.k}")

    @property
    def label(self) -> str:
        return "M" if self.k is None else str(self.k)


AT_M = Selection()


@dataclass(frozen=True)
class MetricConfig:
    score_fn: ScoreFunction
    selection: Selection = AT_M
    pad_short_predictions: bool = True


@dataclass(frozen=True)
class MetricResult:
    p_score: float
    r_score: float
    f_score: float
    n_pred_used: int
    n_gold: int


def select_predictions(pred: Sequence[NormalizedPhrase], config: MetricConfig,
                       ) -> tuple[list[NormalizedPhrase], int]:
    """Apply the selection policy; returns (kept phrases, effective count)."""
    k = config.selection.k
    if k is None:
        return list(pred), len(pred)
    kept = list(pred[:k])
    if len(pred) < k and config.pad_short_predictions:
        return kept, k
    return kept, min(len(pred), k)


def soft_f(pred_set: Sequence[NormalizedPhrase], gold_set: Sequence[NormalizedPhrase],
           config: MetricConfig,
           embeddings: "EmbeddingProvider | None" = None) -> MetricResult | None:
    """Soft F over two phrase sets; None when gold is empty (undefined,
    excluded from corpus averages)."""
    if not gold_set:
        return None
    selected, effective = select_predictions(pred_set, config)
    if not selected:
        return MetricResult(0.0, 0.0, 0.0, n_pred_used=effective,
                            n_gold=len(gold_set))
    matrix = score_matrix(config.score_fn, selected, gold_set, embeddings)
    p = float(matrix.max(axis=1).sum()) / effective
    r = float(matrix.max(axis=0).mean())
    f = 0.0 if p + r == 0.0 else 2.0 * p * r / (p + r)
    return MetricResult(p, r, f, n_pred_used=effective, n_gold=len(gold_set))


def classic_f1(pred_set: Sequence[NormalizedPhrase], gold_set: Sequence[NormalizedPhrase],
               selection: Selection = AT_M,
               pad_short_predictions: bool = True) -> MetricResult | None:
    """Standard exact-match F1: soft_f with the exact kernel."""
    config = MetricConfig(EXACT, selection, pad_short_predictions)
    return soft_f(pred_set, gold_set, config)


def split_by_presence(record: "PredictionRecord", doc: "Document",
                      dedup_gold: bool = False,
                      ) -> tuple[list[NormalizedPhrase], list[NormalizedPhrase],
                                 list[NormalizedPhrase], list[NormalizedPhrase]]:
    """Route deduplicated predictions and gold phrases by source-document
    presence; returns (present_pred, absent_pred, present_gold, absent_gold)."""
    preds = [normalize(p) for p in dedup(record.phrases)]
    gold_src = dedup(doc.gold) if dedup_gold else list(doc.gold)
    golds = [normalize(g) for g in gold_src]
    present_pred = [p for p in preds
                    if classify_presence(p, doc) is PresenceLabel.PRESENT]
    absent_pred = [p for p in preds
                   if classify_presence(p, doc) is PresenceLabel.ABSENT]
    present_gold = [g for g in golds
                    if classify_presence(g, doc) is PresenceLabel.PRESENT]
    absent_gold = [g for g in golds
                   if classify_presence(g, doc) is PresenceLabel.ABSENT]
    return present_pred, absent_pred, present_gold, absent_gold
