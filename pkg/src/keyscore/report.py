"""Corpus-level aggregation, correlation against human scores, and
deterministic report emission (JSON / CSV / plot data files).

Macro averaging is per-document-then-mean; documents whose result is
undefined for a metric (empty gold side) are excluded from that metric's
mean and counted. All emission is byte-deterministic: stable key order,
fixed row order, 4-decimal floats in tables, full precision in JSON.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Mapping, Sequence

import numpy as np

from .calibration import CalibrationReport
from .confidence import KppHistogram, PositionStats
from .errors import UndefinedResultError, ValidationError
from .positional import PositionalReport
from .softscore import MetricConfig, MetricResult, soft_f, split_by_presence
from .matching import ScoreFunction, ScoreKind
from .softscore import Selection

if TYPE_CHECKING:
    from .corpus import Corpus, Document, PredictionRecord
    from .embeddings import EmbeddingProvider

logger = logging.getLogger(__name__)

SPLITS = ("all", "present", "absent")

_KIND_LABELS = {ScoreKind.EXACT: "F1", ScoreKind.KMR: "F_KMR",
                ScoreKind.EMBEDDING_GREEDY: "F_BS"}


@dataclass(frozen=True)
class MetricSpec:
    """A named metric configuration, e.g. F_KMR@M."""

    name: str
    config: MetricConfig


def make_metric_spec(kind: str, at: int | None = None, threshold: float = 0.4,
                     rescale_baseline: float | None = None,
                     pad_short_predictions: bool = True) -> MetricSpec:
    kinds = {"f1": ScoreKind.EXACT, "kmr": ScoreKind.KMR,
             "embed": ScoreKind.EMBEDDING_GREEDY}
    if kind not in kinds:
        raise ValidationError(f"unknown metric kind {kind!r}; choose from {sorted(kinds)}")
    score_kind = kinds[kind]
    score_fn = ScoreFunction(
        kind=score_kind, threshold=threshold,
        rescale_baseline=rescale_baseline if score_kind is ScoreKind.EMBEDDING_GREEDY else None)
    selection = Selection(at)
    config = MetricConfig(score_fn=score_fn, selection=selection,
                          pad_short_predictions=pad_short_predictions)
    return MetricSpec(name=f"{_KIND_LABELS[score_kind]}@{selection.label}",
                      config=config)


def evaluate_document(doc: "Document", record: "PredictionRecord",
                      specs: Sequence[MetricSpec],
                      embeddings: "EmbeddingProvider | None" = None,
                      dedup_gold: bool = False,
                      ) -> dict[str, dict[str, MetricResult | None]]:
    """Per-split, per-metric results for one document."""
    present_pred, absent_pred, present_gold, absent_gold = split_by_presence(
        record, doc, dedup_gold=dedup_gold)
    sides = {
        "all": (present_pred + absent_pred, present_gold + absent_gold),
        "present": (present_pred, present_gold),
        "absent": (absent_pred, absent_gold),
    }
    out: dict[str, dict[str, MetricResult | None]] = {}
    for split, (preds, golds) in sides.items():
        out[split] = {spec.name: soft_f(preds, golds, spec.config, embeddings)
                      for spec in specs}
    return out


@dataclass
class CorpusReport:
    """Aggregated corpus metrics plus optional analysis sections."""

    per_metric: dict[str, dict[str, dict]]
    n_docs: int
    n_unpaired: int = 0
    calibration: dict[str, CalibrationReport] | None = None
    positional: PositionalReport | None = None
    confidence: dict | None = None
    per_doc_f: dict[str, dict[str, float]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        out: dict = {"n_docs": self.n_docs, "n_unpaired": self.n_unpaired,
                     "metrics": self.per_metric}
        if self.calibration is not None:
            out["calibration"] = {split: rep.to_dict()
                                  for split, rep in self.calibration.items()}
        if self.positional is not None:
            out["positional"] = self.positional.to_dict()
        if self.confidence is not None:
            out["confidence"] = self.confidence
        return out

    def to_csv_rows(self) -> list[list]:
        rows: list[list] = [["split", "metric", "p_score", "r_score", "f_score",
                             "n_docs", "n_excluded"]]
        for split in SPLITS:
            metrics = self.per_metric.get(split, {})
            for name in sorted(metrics):
                m = metrics[name]
                rows.append([split, name, m["p_score"], m["r_score"], m["f_score"],
                             m["n_docs"], m["n_excluded"]])
        return rows

    def to_plotdata(self) -> dict[str, list[list]]:
        files = {"metrics.csv": self.to_csv_rows()}
        if self.calibration is not None:
            for split, rep in sorted(self.calibration.items()):
                files[f"reliability_{split}.csv"] = _reliability_rows(rep)
        if self.positional is not None:
            files["positional.csv"] = _positional_rows(self.positional)
        if self.confidence is not None:
            files.update(_confidence_plotfiles(self.confidence))
        return files


def aggregate(per_doc: Mapping[str, dict[str, dict[str, MetricResult | None]]],
              n_unpaired: int = 0) -> CorpusReport:
    """Macro-average per-document results into a corpus report."""
    if not per_doc:
        raise ValidationError("cannot aggregate zero evaluated documents")
    doc_ids = list(per_doc)
    metric_names: list[str] = []
    for split_results in per_doc[doc_ids[0]].values():
        metric_names = list(split_results)
        break
    per_metric: dict[str, dict[str, dict]] = {}
    per_doc_f: dict[str, dict[str, float]] = {}
    for split in SPLITS:
        per_metric[split] = {}
        for name in metric_names:
            defined = [(doc_id, per_doc[doc_id][split][name]) for doc_id in doc_ids
                       if per_doc[doc_id][split][name] is not None]
            n_excluded = len(doc_ids) - len(defined)
            if not defined:
                logger.warning("metric %s has no defined documents on split %s; omitted",
                               name, split)
                continue
            results = [r for _, r in defined]
            per_metric[split][name] = {
                "p_score": sum(r.p_score for r in results) / len(results),
                "r_score": sum(r.r_score for r in results) / len(results),
                "f_score": sum(r.f_score for r in results) / len(results),
                "n_docs": len(results),
                "n_excluded": n_excluded,
            }
            if split == "all":
                per_doc_f[name] = {doc_id: r.f_score for doc_id, r in defined}
    return CorpusReport(per_metric=per_metric, n_docs=len(doc_ids),
                        n_unpaired=n_unpaired, per_doc_f=per_doc_f)


def evaluate_corpus(corpus: "Corpus", specs: Sequence[MetricSpec],
                    embeddings: "EmbeddingProvider | None" = None,
                    dedup_gold: bool = False, workers: int = 1) -> CorpusReport:
    """Evaluate every paired document, optionally with a thread pool.

    Results are keyed by doc_id and reduced in documents-file order, so the
    report does not depend on worker scheduling.
    """
    pairs = list(corpus.pairs())
    if not pairs:
        raise ValidationError("corpus has no documents with predictions")
    n_unpaired = len(corpus.documents) - len(pairs)

    def one(pair):
        doc, record = pair
        return doc.doc_id, evaluate_document(doc, record, specs, embeddings,
                                             dedup_gold=dedup_gold)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = dict(pool.map(one, pairs))
    else:
        results = dict(one(p) for p in pairs)
    ordered = {doc.doc_id: results[doc.doc_id] for doc, _ in pairs}
    return aggregate(ordered, n_unpaired=n_unpaired)


@dataclass(frozen=True)
class CorrelationResult:
    metric: str
    pearson_r: float
    n: int
    n_dropped: int = 0

    def to_dict(self) -> dict:
        return {"metric": self.metric, "pearson_r": self.pearson_r,
                "n": self.n, "n_dropped": self.n_dropped}


@dataclass
class CorrelationReport:
    results: list[CorrelationResult]

    def to_dict(self) -> dict:
        return {"correlations": [r.to_dict() for r in self.results]}

    def to_csv_rows(self) -> list[list]:
        rows: list[list] = [["metric", "pearson_r", "n", "n_dropped"]]
        for r in self.results:
            rows.append([r.metric, r.pearson_r, r.n, r.n_dropped])
        return rows


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Sample Pearson correlation; errors on short or constant series."""
    if len(xs) != len(ys):
        raise ValidationError("pearson requires equally long series")
    if len(xs) < 2:
        raise UndefinedResultError("pearson requires at least 2 paired samples")
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    dx = x - x.mean()
    dy = y - y.mean()
    den = float(np.sqrt((dx * dx).sum() * (dy * dy).sum()))
    if den == 0.0:
        raise UndefinedResultError("pearson undefined for a constant series")
    return float((dx * dy).sum()) / den


def correlate(metric_scores: Mapping[str, float],
              human_scores: Mapping[str, float],
              metric_name: str) -> CorrelationResult:
    """Pearson r between per-document metric values and human scores,
    joined on doc_id; unpaired ids are dropped and counted."""
    shared = sorted(set(metric_scores) & set(human_scores))
    n_dropped = (len(set(metric_scores) | set(human_scores)) - len(shared))
    if n_dropped:
        logger.info("correlate(%s): dropped %d unpaired doc_ids", metric_name,
                    n_dropped)
    xs = [metric_scores[d] for d in shared]
    ys = [human_scores[d] for d in shared]
    return CorrelationResult(metric=metric_name, pearson_r=pearson(xs, ys),
                             n=len(shared), n_dropped=n_dropped)


def _fmt_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


def _reliability_rows(rep: CalibrationReport) -> list[list]:
    rows: list[list] = [["bin_midpoint", "accuracy", "count"]]
    for b in rep.bins:
        if b.count > 0:
            rows.append([(b.lo + b.hi) / 2.0, b.accuracy, b.count])
    return rows


def _positional_rows(rep: PositionalReport) -> list[list]:
    rows: list[list] = [["section", "gold_count", "miss_percent",
                         "soft_miss_percent"]]
    for i in range(len(rep.gold_counts)):
        rows.append([i + 1, rep.gold_counts[i], rep.miss_percent[i],
                     rep.soft_miss_percent[i]])
    return rows


def _histogram_rows(hist: KppHistogram) -> list[list]:
    rows: list[list] = [["bin_lo", "bin_hi", "count"]]
    edges = hist.bin_edges()
    for i, count in enumerate(hist.counts):
        rows.append([edges[i], edges[i + 1], count])
    rows.append([edges[-1], "", hist.overflow])
    return rows


def _position_rows(stats: Sequence[PositionStats]) -> list[list]:
    rows: list[list] = [["position", "low", "q1", "median", "q3", "high", "count"]]
    for s in stats:
        rows.append([s.position, s.low, s.q1, s.median, s.q3, s.high, s.count])
    return rows


def _confidence_plotfiles(section: dict) -> dict[str, list[list]]:
    files = {}
    for split, hist in sorted(section.get("kpp_histogram", {}).items()):
        rows: list[list] = [["bin_lo", "bin_hi", "count"]]
        lo, width = hist["lo"], hist["bin_width"]
        for i, count in enumerate(hist["counts"]):
            rows.append([lo + i * width, lo + (i + 1) * width, count])
        files[f"kpp_histogram_{split}.csv"] = rows
    for split, stats in sorted(section.get("position_stats", {}).items()):
        rows = [["position", "low", "q1", "median", "q3", "high", "count"]]
        for s in stats:
            rows.append([s["position"], s["low"], s["q1"], s["median"],
                         s["q3"], s["high"], s["count"]])
        files[f"position_stats_{split}.csv"] = rows
    return files


@dataclass
class CalibrationBundle:
    """Calibration reports keyed by presence split."""

    reports: dict[str, CalibrationReport]

    def to_dict(self) -> dict:
        return {"calibration": {split: rep.to_dict()
                                for split, rep in self.reports.items()}}

    def to_csv_rows(self) -> list[list]:
        rows: list[list] = [["split", "k", "n", "ece_percent"]]
        for split in sorted(self.reports):
            rep = self.reports[split]
            rows.append([split, len(rep.bins), rep.n, rep.ece_percent])
        return rows

    def to_plotdata(self) -> dict[str, list[list]]:
        return {f"reliability_{split}.csv": _reliability_rows(rep)
                for split, rep in sorted(self.reports.items())}


@dataclass
class PositionalBundle:
    report: PositionalReport

    def to_dict(self) -> dict:
        return self.report.to_dict()

    def to_csv_rows(self) -> list[list]:
        return _positional_rows(self.report)

    def to_plotdata(self) -> dict[str, list[list]]:
        return {"positional.csv": self.to_csv_rows()}


@dataclass
class ConfidenceBundle:
    """KPP histograms and per-position stats keyed by presence split."""

    histograms: dict[str, KppHistogram]
    position_stats: dict[str, list[PositionStats]]

    def to_dict(self) -> dict:
        return {
            "kpp_histogram": {split: h.to_dict()
                              for split, h in self.histograms.items()},
            "position_stats": {split: [s.to_dict() for s in stats]
                               for split, stats in self.position_stats.items()},
        }

    def to_csv_rows(self) -> list[list]:
        rows: list[list] = [["split", "n", "median_kpp", "overflow"]]
        for split in sorted(self.histograms):
            h = self.histograms[split]
            rows.append([split, h.n, h.median, h.overflow])
        return rows

    def to_plotdata(self) -> dict[str, list[list]]:
        files = {f"kpp_histogram_{split}.csv": _histogram_rows(h)
                 for split, h in sorted(self.histograms.items())}
        for split, stats in sorted(self.position_stats.items()):
            files[f"position_stats_{split}.csv"] = _position_rows(stats)
        return files


def render_csv(rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in rows:
        writer.writerow([_fmt_cell(c) for c in row])
    return buf.getvalue()


def emit(report, fmt: str, path=None) -> None:
    """Write a report deterministically as json, csv or plot-data files.

    json/csv go to ``path`` (or stdout when None); plotdata treats ``path``
    as a directory and writes one CSV per plot.
    """
    if fmt == "json":
        payload = json.dumps(report.to_dict(), sort_keys=True, indent=2,
                             ensure_ascii=False) + "\n"
    elif fmt == "csv":
        if not hasattr(report, "to_csv_rows"):
            raise ValidationError("this report has no CSV rendering")
        payload = render_csv(report.to_csv_rows())
    elif fmt == "plotdata":
        if not hasattr(report, "to_plotdata"):
            raise ValidationError("this report has no plot-data rendering")
        if path is None:
            raise ValidationError("--out directory is required for plotdata")
        out_dir = Path(path)
        out_dir.mkdir(parents=True, exist_ok=True)
        for name, rows in sorted(report.to_plotdata().items()):
            (out_dir / name).write_text(render_csv(rows), encoding="utf-8")
        return
    else:
        raise ValidationError(f"unknown output format {fmt!r}")
    if path is None:
        print(payload, end="")
    else:
        Path(path).write_text(payload, encoding="utf-8")
