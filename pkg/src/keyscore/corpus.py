"""Corpus data model and line-delimited JSON ingestion.

File schemas (one JSON object per line, UTF-8):

  documents:   {"doc_id": str, "text": str, "gold": [str, ...]}
  predictions: {"doc_id": str, "tokens": [str], "probs": [float],
                "special_mask": [bool]   (optional; derived from delimiters),
                "spans": [[int, int], ...]  (optional; 0-based inclusive)}
  human scores: {"doc_id": str, "score": float}

A loaded Corpus is immutable and safe for concurrent reads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterator

from .errors import ValidationError
from .textnorm import DocStemIndex, stem, tokenize

DEFAULT_DELIMITERS = frozenset({";", "<sep>", "<eos>", "</s>", "<pad>"})


@dataclass(frozen=True)
class Keyphrase:
    """A keyphrase string plus its derived word tokens and stems."""

    raw: str
    tokens: tuple[str, ...]
    stemmed: tuple[str, ...]

    @classmethod
    def from_raw(cls, raw: str) -> "Keyphrase":
        tokens = tuple(tokenize(raw))
        if not tokens:
            raise ValidationError(
                f"keyphrase has no word tokens after normalization: {raw!r}")
        return cls(raw=raw, tokens=tokens, stemmed=tuple(stem(t) for t in tokens))


@dataclass
class Document:
    doc_id: str
    text: str
    gold: tuple[Keyphrase, ...]
    _stem_index: DocStemIndex | None = field(
        default=None, repr=False, compare=False)

    def __post_init__(self):
        if not self.doc_id:
            raise ValidationError("doc_id must be non-empty")
        if len(self.text) < 1:
            raise ValidationError(f"document {self.doc_id}: text must be non-empty")


@dataclass(frozen=True)
class TokenTrace:
    """Generated tokens with their conditional probabilities.

    Probabilities must lie in (0, 1]: a zero probability would make the
    perplexity of any span containing it undefined, so it is rejected at
    ingestion rather than silently clamped.
    """

    tokens: tuple[str, ...]
    probs: tuple[float, ...]
    special_mask: tuple[bool, ...]

    def __post_init__(self):
        if not (len(self.tokens) == len(self.probs) == len(self.special_mask)):
            raise ValidationError(
                "trace fields must have equal length: "
                f"{len(self.tokens)} tokens, {len(self.probs)} probs, "
                f"{len(self.special_mask)} mask entries")
        for i, p in enumerate(self.probs):
            if math.isnan(p) or not 0.0 < p <= 1.0:
                raise ValidationError(
                    f"probability at token {i} is {p!r}; must be in (0, 1] "
                    "(zero would make span perplexity undefined)")

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class KeyphraseSpan:
    """Inclusive token index range [start, end] within a trace (0-based)."""

    start: int
    end: int

    def __post_init__(self):
        if not 0 <= self.start <= self.end:
            raise ValidationError(f"invalid span ({self.start}, {self.end})")

    @property
    def length(self) -> int:
        return self.end - self.start + 1


@dataclass(frozen=True)
class PredictionRecord:
    """One model's ordered keyphrase predictions for a document."""

    doc_id: str
    trace: TokenTrace
    spans: tuple[KeyphraseSpan, ...]
    phrases: tuple[Keyphrase, ...]


@dataclass(frozen=True)
class HumanScoreRecord:
    doc_id: str
    score: float

    def __post_init__(self):
        if math.isnan(self.score) or not 0.0 <= self.score <= 1.0:
            raise ValidationError(
                f"human score for {self.doc_id!r} is {self.score!r}; must be in [0, 1]")


@dataclass
class Corpus:
    """Documents paired with prediction records, keyed by doc_id."""

    documents: dict[str, Document]
    predictions: dict[str, PredictionRecord]

    def pairs(self) -> Iterator[tuple[Document, PredictionRecord]]:
        """(document, record) pairs in documents-file order."""
        for doc_id, doc in self.documents.items():
            record = self.predictions.get(doc_id)
            if record is not None:
                yield doc, record

    @property
    def n_paired(self) -> int:
        return sum(1 for doc_id in self.documents if doc_id in self.predictions)

    def __eq__(self, other):
        if not isinstance(other, Corpus):
            return NotImplemented
        return (self.documents == other.documents
                and self.predictions == other.predictions)


def segment_spans(trace: TokenTrace,
                  delimiter_tokens: frozenset[str] | set[str] = DEFAULT_DELIMITERS,
                  ) -> list[KeyphraseSpan]:
    """Maximal runs of non-special tokens between delimiters; empty runs dropped."""
    if not delimiter_tokens:
        raise ValidationError("delimiter token set must be non-empty")
    spans = []
    start = None
    for i, tok in enumerate(trace.tokens):
        special = trace.special_mask[i] or tok in delimiter_tokens
        if special:
            if start is not None:
                spans.append(KeyphraseSpan(start, i - 1))
                start = None
        elif start is None:
            start = i
    if start is not None:
        spans.append(KeyphraseSpan(start, len(trace) - 1))
    return spans


def build_trace(tokens, probs, special_mask=None, *,
                delimiters=DEFAULT_DELIMITERS, probs_are_log=False) -> TokenTrace:
    """Construct a validated TokenTrace, deriving the mask from delimiters
    when none is given. With probs_are_log, probabilities are exponentiated."""
    if probs_are_log:
        probs = [math.exp(p) for p in probs]
    if special_mask is None:
        special_mask = [t in delimiters for t in tokens]
    return TokenTrace(tuple(tokens), tuple(float(p) for p in probs),
                      tuple(bool(b) for b in special_mask))


def build_record(doc_id: str, trace: TokenTrace, spans=None, *,
                 delimiters=DEFAULT_DELIMITERS) -> PredictionRecord:
    """Assemble a PredictionRecord, deriving spans when not supplied.

    Explicit spans win over derivation but must tile the non-special portion
    of the trace: in increasing order, non-overlapping, free of special
    tokens, and jointly covering every non-special token.
    """
    if spans is None:
        span_objs = tuple(segment_spans(trace, delimiters))
    else:
        span_objs = tuple(KeyphraseSpan(int(s), int(e)) for s, e in spans)
        covered = []
        prev_end = -1
        for sp in span_objs:
            if sp.start <= prev_end:
                raise ValidationError(
                    f"{doc_id}: spans overlap or are out of order at ({sp.start}, {sp.end})")
            if sp.end >= len(trace):
                raise ValidationError(
                    f"{doc_id}: span ({sp.start}, {sp.end}) exceeds trace length {len(trace)}")
            for i in range(sp.start, sp.end + 1):
                if trace.special_mask[i]:
                    raise ValidationError(
                        f"{doc_id}: span ({sp.start}, {sp.end}) covers special token "
                        f"{trace.tokens[i]!r} at index {i}")
                covered.append(i)
            prev_end = sp.end
        non_special = [i for i in range(len(trace)) if not trace.special_mask[i]]
        if covered != non_special:
            raise ValidationError(
                f"{doc_id}: explicit spans must cover all non-special tokens exactly")
    phrases = tuple(
        Keyphrase.from_raw(" ".join(trace.tokens[sp.start:sp.end + 1]))
        for sp in span_objs)
    return PredictionRecord(doc_id=doc_id, trace=trace, spans=span_objs,
                            phrases=phrases)


def _iter_jsonl(path) -> Iterator[tuple[int, dict]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            if not isinstance(obj, dict):
                raise ValidationError(f"{path}:{lineno}: expected a JSON object")
            yield lineno, obj


def _require(obj: dict, key: str, path, lineno: int):
    if key not in obj:
        raise ValidationError(f"{path}:{lineno}: missing required field {key!r}")
    return obj[key]


def load_documents(path) -> dict[str, Document]:
    docs: dict[str, Document] = {}
    for lineno, obj in _iter_jsonl(path):
        doc_id = _require(obj, "doc_id", path, lineno)
        text = _require(obj, "text", path, lineno)
        gold_raw = obj.get("gold", [])
        try:
            gold = tuple(Keyphrase.from_raw(g) for g in gold_raw)
            doc = Document(doc_id=str(doc_id), text=str(text), gold=gold)
        except ValidationError as exc:
            raise ValidationError(f"{path}:{lineno}: {exc}") from exc
        if doc.doc_id in docs:
            raise ValidationError(f"{path}:{lineno}: duplicate doc_id {doc.doc_id!r}")
        docs[doc.doc_id] = doc
    return docs


def load_predictions(path, *, delimiters=DEFAULT_DELIMITERS,
                     probs_are_log=False) -> dict[str, PredictionRecord]:
    records: dict[str, PredictionRecord] = {}
    for lineno, obj in _iter_jsonl(path):
        doc_id = str(_require(obj, "doc_id", path, lineno))
        tokens = _require(obj, "tokens", path, lineno)
        probs = _require(obj, "probs", path, lineno)
        try:
            trace = build_trace(tokens, probs, obj.get("special_mask"),
                                delimiters=delimiters, probs_are_log=probs_are_log)
            record = build_record(doc_id, trace, obj.get("spans"),
                                  delimiters=delimiters)
        except ValidationError as exc:
            raise ValidationError(f"{path}:{lineno}: {exc}") from exc
        if doc_id in records:
            raise ValidationError(
                f"{path}:{lineno}: duplicate prediction for doc_id {doc_id!r}")
        records[doc_id] = record
    return records


def load_corpus(documents_path, predictions_path, *,
                delimiters=DEFAULT_DELIMITERS, probs_are_log=False) -> Corpus:
    """Load and pair documents with predictions.

    Every prediction must reference a known document; orphans are reported
    together in one error.
    """
    documents = load_documents(documents_path)
    predictions = load_predictions(
        predictions_path, delimiters=delimiters, probs_are_log=probs_are_log)
    orphans = [doc_id for doc_id in predictions if doc_id not in documents]
    if orphans:
        raise ValidationError(
            "predictions reference unknown doc_ids: " + ", ".join(sorted(orphans)))
    return Corpus(documents=documents, predictions=predictions)


def load_human_scores(path) -> list[HumanScoreRecord]:
    out = []
    for lineno, obj in _iter_jsonl(path):
        doc_id = str(_require(obj, "doc_id", path, lineno))
        score = _require(obj, "score", path, lineno)
        try:
            out.append(HumanScoreRecord(doc_id=doc_id, score=float(score)))
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"{path}:{lineno}: bad score {score!r}") from exc
        except ValidationError as exc:
            raise ValidationError(f"{path}:{lineno}: {exc}") from exc
    return out


def save_corpus(corpus: Corpus, documents_path, predictions_path) -> None:
    """Write a corpus back to the two JSONL files.

    Derived state (masks, spans) is written explicitly so a reload
    reconstructs the corpus field-by-field.
    """
    with open(documents_path, "w", encoding="utf-8") as fh:
        for doc in corpus.documents.values():
            fh.write(json.dumps(
                {"doc_id": doc.doc_id, "text": doc.text,
                 "gold": [g.raw for g in doc.gold]},
                ensure_ascii=False, sort_keys=True) + "\n")
    with open(predictions_path, "w", encoding="utf-8") as fh:
        for rec in corpus.predictions.values():
            fh.write(json.dumps(
                {"doc_id": rec.doc_id,
                 "tokens": list(rec.trace.tokens),
                 "probs": list(rec.trace.probs),
                 "special_mask": list(rec.trace.special_mask),
                 "spans": [[sp.start, sp.end] for sp in rec.spans]},
                ensure_ascii=False, sort_keys=True) + "\n")


def save_human_scores(records, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps({"doc_id": rec.doc_id, "score": rec.score},
                                sort_keys=True) + "\n")
