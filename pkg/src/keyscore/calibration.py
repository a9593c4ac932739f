"""Keyphrase-level expected calibration error and reliability-diagram data.

Keyphrase confidences (inverse perplexities) are bucketed into k equal-width
bins over [0, 1]; each bin contributes its sample share times the absolute
gap between accuracy and mean confidence:

    ECE = sum_i (|B_i| / n) * |acc(B_i) - confid(B_i)|

Correctness of a predicted keyphrase is exact stemmed match against any
gold phrase; a soft-correctness mode (mean best kernel score) is available
behind the score_fn argument. ECE is reported both as a fraction and as a
percentage (the customary table scale).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .errors import ValidationError
from .confidence import record_confidences
from .matching import ScoreFunction, score_matrix
from .textnorm import NormalizedPhrase, PresenceLabel, normalize

if TYPE_CHECKING:
    from .corpus import Corpus

__all__ = ["CalibrationBin", "CalibrationReport", "correctness", "calibrate",
           "reliability_data", "merge_reports"]


def correctness(pred_phrase: NormalizedPhrase,
                gold_set: Sequence[NormalizedPhrase]) -> bool:
    """True iff the prediction's stems equal some gold phrase's stems."""
    return any(pred_phrase.stems == g.stems for g in gold_set)


@dataclass(frozen=True)
class CalibrationBin:
    index: int          # 1-based
    lo: float
    hi: float
    count: int
    mean_confidence: float
    accuracy: float

    def to_dict(self) -> dict:
        return {"index": self.index, "lo": self.lo, "hi": self.hi,
                "count": self.count, "mean_conf": self.mean_confidence,
                "acc": self.accuracy}


@dataclass(frozen=True)
class CalibrationReport:
    bins: tuple[CalibrationBin, ...]
    ece_fraction: float
    ece_percent: float
    n: int

    def to_dict(self) -> dict:
        return {"k": len(self.bins), "n": self.n,
                "ece_fraction": self.ece_fraction,
                "ece_percent": self.ece_percent,
                "bins": [b.to_dict() for b in self.bins]}


def _collect_samples(corpus: "Corpus",
                     presence_filter: PresenceLabel | None,
                     score_fn: ScoreFunction | None) -> tuple[list[float], list[float]]:
    confidences: list[float] = []
    corrects: list[float] = []
    for doc, record in corpus.pairs():
        golds = [normalize(g) for g in doc.gold]
        for kc in record_confidences(record, doc):
            if presence_filter is not None and kc.presence is not presence_filter:
                continue
            confidences.append(kc.confidence)
            if score_fn is None:
                corrects.append(1.0 if correctness(kc.phrase, golds) else 0.0)
            elif golds:
                matrix = score_matrix(score_fn, [kc.phrase], golds)
                corrects.append(float(matrix.max()))
            else:
                corrects.append(0.0)
    return confidences, corrects


def _bins_from_samples(conf: np.ndarray, corr: np.ndarray, edges: np.ndarray,
                       ) -> tuple[CalibrationBin, ...]:
    k = edges.size - 1
    # half-open bins, last bin closed at the upper edge
    idx = np.clip(np.searchsorted(edges, conf, side="right") - 1, 0, k - 1)
    bins = []
    for i in range(k):
        mask = idx == i
        count = int(mask.sum())
        if count:
            mean_conf = float(conf[mask].mean())
            acc = float(corr[mask].mean())
        else:
            mean_conf = 0.0
            acc = 0.0
        bins.append(CalibrationBin(index=i + 1, lo=float(edges[i]),
                                   hi=float(edges[i + 1]), count=count,
                                   mean_confidence=mean_conf, accuracy=acc))
    return tuple(bins)


def _report_from_bins(bins: tuple[CalibrationBin, ...], n: int) -> CalibrationReport:
    ece = sum((b.count / n) * abs(b.accuracy - b.mean_confidence)
              for b in bins if b.count)
    return CalibrationReport(bins=bins, ece_fraction=ece,
                             ece_percent=100.0 * ece, n=n)


def calibrate_samples(confidences: Sequence[float], corrects: Sequence[float],
                      k: int = 10, equal_mass: bool = False) -> CalibrationReport:
    """Calibration report from raw (confidence, correctness) samples."""
    if k < 2:
        raise ValidationError(f"calibration needs k >= 2 bins, got {k}")
    if not confidences:
        raise ValidationError("cannot calibrate a corpus with zero keyphrases")
    conf = np.asarray(confidences, dtype=np.float64)
    corr = np.asarray(corrects, dtype=np.float64)
    if equal_mass:
        edges = np.quantile(conf, np.linspace(0.0, 1.0, k + 1))
        edges[0], edges[-1] = 0.0, 1.0
    else:
        edges = np.linspace(0.0, 1.0, k + 1)
    bins = _bins_from_samples(conf, corr, edges)
    return _report_from_bins(bins, conf.size)


def calibrate(corpus: "Corpus", k: int = 10,
              presence_filter: PresenceLabel | None = None,
              equal_mass: bool = False,
              score_fn: ScoreFunction | None = None) -> CalibrationReport:
    """ECE over all (deduplicated) predicted keyphrases of the corpus."""
    confidences, corrects = _collect_samples(corpus, presence_filter, score_fn)
    return calibrate_samples(confidences, corrects, k=k, equal_mass=equal_mass)


def reliability_data(report: CalibrationReport) -> list[tuple[float, float, int]]:
    """(bin midpoint, accuracy, count) per non-empty bin, ascending."""
    out = [((b.lo + b.hi) / 2.0, b.accuracy, b.count)
           for b in report.bins if b.count > 0]
    out.sort(key=lambda t: t[0])
    return out


def merge_reports(a: CalibrationReport, b: CalibrationReport) -> CalibrationReport:
    """Combine two partial reports with identical binning (counts summed,
    means count-weighted); equals calibrating the concatenated samples."""
    if len(a.bins) != len(b.bins):
        raise ValidationError("cannot merge reports with different bin counts")
    merged = []
    for ba, bb in zip(a.bins, b.bins):
        if (ba.lo, ba.hi) != (bb.lo, bb.hi):
            raise ValidationError("cannot merge reports with different bin edges")
        count = ba.count + bb.count
        if count:
            mean_conf = (ba.mean_confidence * ba.count
                         + bb.mean_confidence * bb.count) / count
            acc = (ba.accuracy * ba.count + bb.accuracy * bb.count) / count
        else:
            mean_conf = 0.0
            acc = 0.0
        merged.append(CalibrationBin(index=ba.index, lo=ba.lo, hi=ba.hi,
                                     count=count, mean_confidence=mean_conf,
                                     accuracy=acc))
    return _report_from_bins(tuple(merged), a.n + b.n)
