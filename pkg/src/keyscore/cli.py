"""Command-line surface tying the toolkit together.

Subcommands: evaluate, calibrate, positional, confidence, correlate.
Exit codes: 0 success, 1 validation/usage error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import calibration as cal
from . import positional as pos
from . import report as rep
from .confidence import kpp_histogram, position_stats
from .corpus import DEFAULT_DELIMITERS, load_corpus, load_human_scores
from .embeddings import resolve_provider
from .errors import KeyscoreError, ValidationError
from .matching import ScoreFunction, ScoreKind
from .textnorm import PresenceLabel

logger = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    # per the CLI contract, usage errors exit 1 (argparse defaults to 2)
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_at(value: str) -> int | None:
    if value.lower() == "m":
        return None
    try:
        k = int(value)
    except ValueError:
        raise ValidationError(f"--at must be 'm' or a positive integer, got {value!r}")
    if k < 1:
        raise ValidationError(f"--at must be >= 1, got {k}")
    return k


def _parse_presence(value: str) -> PresenceLabel | None:
    return None if value == "all" else PresenceLabel(value)


def _delimiters(args) -> frozenset[str]:
    if args.delimiter:
        return frozenset(args.delimiter)
    return DEFAULT_DELIMITERS


def _load(args):
    return load_corpus(args.docs, args.preds, delimiters=_delimiters(args),
                       probs_are_log=args.log_probs)


def _metric_specs(args):
    kinds = args.metric or ["f1"]
    at = _parse_at(args.at)
    return [rep.make_metric_spec(kind, at=at, threshold=args.threshold,
                                 rescale_baseline=args.rescale_baseline,
                                 pad_short_predictions=not args.no_pad)
            for kind in kinds]


def _provider_for(args, specs):
    needs = any(s.config.score_fn.kind is ScoreKind.EMBEDDING_GREEDY for s in specs)
    provider = resolve_provider(args.embeddings, args.model_id)
    if needs and provider is None:
        raise ValidationError(
            "the embed metric requires --embeddings (cache path or service URL) "
            "or KEYSCORE_EMBED_URL")
    return provider


def _calibration_splits(corpus, splits, bins, equal_mass=False):
    """Calibrate per presence split; filtered splits with zero keyphrases
    are omitted with a warning, an empty 'all' split is a real error."""
    out = {}
    for split in splits:
        try:
            out[split] = cal.calibrate(corpus, k=bins,
                                       presence_filter=_parse_presence(split),
                                       equal_mass=equal_mass)
        except ValidationError:
            if split == "all":
                raise
            logger.warning("calibration split %r has no keyphrases; omitted", split)
    return out


def _cmd_evaluate(args) -> int:
    corpus = _load(args)
    specs = _metric_specs(args)
    provider = _provider_for(args, specs)
    report = rep.evaluate_corpus(corpus, specs, embeddings=provider,
                                 dedup_gold=args.dedup_gold, workers=args.workers)
    if args.full:
        report.calibration = _calibration_splits(
            corpus, ("all", "present", "absent"), args.bins)
        report.positional = pos.positional_report(corpus)
        hist = kpp_histogram(corpus)
        stats = {s.value: position_stats(corpus, presence_filter=s)
                 for s in (PresenceLabel.PRESENT, PresenceLabel.ABSENT)}
        report.confidence = rep.ConfidenceBundle(hist, stats).to_dict()
    rep.emit(report, args.format, args.out)
    return 0


def _cmd_calibrate(args) -> int:
    corpus = _load(args)
    if args.presence == "all":
        reports = _calibration_splits(corpus, ("all", "present", "absent"),
                                      args.bins, args.equal_mass)
    else:
        reports = {args.presence: cal.calibrate(
            corpus, k=args.bins, presence_filter=_parse_presence(args.presence),
            equal_mass=args.equal_mass)}
    rep.emit(rep.CalibrationBundle(reports), args.format, args.out)
    return 0


def _cmd_positional(args) -> int:
    corpus = _load(args)
    soft_fn = ScoreFunction(ScoreKind.KMR, threshold=args.threshold)
    bundle = rep.PositionalBundle(pos.positional_report(corpus, soft_score_fn=soft_fn))
    rep.emit(bundle, args.format, args.out)
    return 0


def _cmd_confidence(args) -> int:
    corpus = _load(args)
    presence = _parse_presence(args.presence)
    hist = kpp_histogram(corpus, presence_filter=presence,
                              bin_width=args.bin_width,
                              kpp_range=(args.kpp_min, args.kpp_max))
    splits = ([PresenceLabel(args.presence)] if presence is not None
              else [PresenceLabel.PRESENT, PresenceLabel.ABSENT])
    stats = {s.value: position_stats(corpus, n_positions=args.positions,
                                          presence_filter=s)
             for s in splits}
    rep.emit(rep.ConfidenceBundle(hist, stats), args.format, args.out)
    return 0


def _cmd_correlate(args) -> int:
    corpus = _load(args)
    specs = _metric_specs(args)
    provider = _provider_for(args, specs)
    human_records = load_human_scores(args.scores)
    human: dict[str, float] = {}
    for record in human_records:
        if record.doc_id in human:
            raise ValidationError(f"duplicate human score for doc_id {record.doc_id!r}")
        human[record.doc_id] = record.score
    report = rep.evaluate_corpus(corpus, specs, embeddings=provider,
                                 dedup_gold=args.dedup_gold, workers=args.workers)
    results = [rep.correlate(report.per_doc_f[spec.name], human, spec.name)
               for spec in specs]
    rep.emit(rep.CorrelationReport(results), args.format, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    io_parent = _Parser(add_help=False)
    io_parent.add_argument("--docs", required=True, help="documents JSONL file")
    io_parent.add_argument("--preds", required=True, help="predictions JSONL file")
    io_parent.add_argument("--delimiter", action="append", default=None,
                           help="keyphrase delimiter token (repeatable); "
                                "default ';' plus common end/sep markers")
    io_parent.add_argument("--log-probs", action="store_true",
                           help="prediction probs are log-probabilities")
    io_parent.add_argument("--out", default=None, help="output path (default stdout)")
    io_parent.add_argument("--format", choices=["json", "csv", "plotdata"],
                           default="json")
    io_parent.add_argument("--workers", type=int, default=1,
                           help="evaluation worker threads")

    metric_parent = _Parser(add_help=False)
    metric_parent.add_argument("--metric", action="append",
                               choices=["f1", "kmr", "embed"],
                               help="metric kind (repeatable; default f1)")
    metric_parent.add_argument("--at", default="m",
                               help="prediction selection: m (all) or an integer k")
    metric_parent.add_argument("--threshold", type=float, default=0.4,
                               help="score-function threshold")
    metric_parent.add_argument("--rescale-baseline", type=float, default=None,
                               help="baseline rescaling constant (embed only)")
    metric_parent.add_argument("--no-pad", action="store_true",
                               help="do not pad short prediction lists at @k")
    metric_parent.add_argument("--embeddings", default=None,
                               help="embedding cache path or service URL")
    metric_parent.add_argument("--model-id", default=None,
                               help="embedding model id (service / mixed caches)")
    metric_parent.add_argument("--dedup-gold", action="store_true",
                               help="also deduplicate gold keyphrases after stemming")

    parser = _Parser(prog="keyscore",
                     description="Evaluation and analysis of keyphrase-generation outputs")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("evaluate", parents=[io_parent, metric_parent],
                       help="set-to-set metrics, split by presence")
    p.add_argument("--full", action="store_true",
                   help="include calibration, positional and confidence sections")
    p.add_argument("--bins", type=int, default=10, help="calibration bins (with --full)")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("calibrate", parents=[io_parent],
                       help="expected calibration error and reliability data")
    p.add_argument("--bins", type=int, default=10)
    p.add_argument("--presence", choices=["all", "present", "absent"], default="all")
    p.add_argument("--equal-mass", action="store_true",
                   help="equal-mass instead of equal-width bins")
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("positional", parents=[io_parent],
                       help="per-section gold counts and miss rates")
    p.add_argument("--threshold", type=float, default=0.4,
                   help="threshold for the soft-miss column's KMR kernel")
    p.set_defaults(func=_cmd_positional)

    p = sub.add_parser("confidence", parents=[io_parent],
                       help="keyphrase perplexity histograms and position stats")
    p.add_argument("--bin-width", type=float, default=0.1)
    p.add_argument("--kpp-min", type=float, default=1.0)
    p.add_argument("--kpp-max", type=float, default=5.0)
    p.add_argument("--positions", type=int, default=5)
    p.add_argument("--presence", choices=["all", "present", "absent"], default="all")
    p.set_defaults(func=_cmd_confidence)

    p = sub.add_parser("correlate", parents=[io_parent, metric_parent],
                       help="Pearson correlation of metrics against human scores")
    p.add_argument("--scores", required=True, help="human scores JSONL file")
    p.set_defaults(func=_cmd_correlate)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return args.func(args)
    except KeyscoreError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
