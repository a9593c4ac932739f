"""Document-section binning of present gold keyphrases and per-section
miss rates.

The document is split into five equal character sections; a present gold
phrase belongs to the section containing the character offset of its first
stemmed-token match:

    section = 1 + floor(5 * first_char / |text|), clamped to 5

A gold phrase counts as missed when no (deduplicated) predicted phrase of
the same document matches it exactly after stemming; a soft-match column
using the KMR kernel is reported alongside.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

from .matching import KMR, ScoreFunction, score_matrix
from .textnorm import (NormalizedPhrase, dedup, doc_stem_index,
                       find_stem_subsequence, normalize)

if TYPE_CHECKING:
    from .corpus import Corpus, Document

N_SECTIONS = 5


def first_occurrence(phrase: NormalizedPhrase, doc: "Document") -> int | None:
    """Character offset of the earliest contiguous stemmed-token match, or
    None when the phrase is absent."""
    index = doc_stem_index(doc)
    pos = find_stem_subsequence(index.stems, phrase.stems)
    if pos is None:
        return None
    return index.offsets[pos]


def section_of(offset: int, text_length: int) -> int:
    if text_length < N_SECTIONS:
        return 1
    return min(N_SECTIONS, 1 + (N_SECTIONS * offset) // text_length)


@dataclass(frozen=True)
class SectionAssignment:
    phrase: NormalizedPhrase
    section: int
    first_char: int


def assign_sections(doc: "Document",
                    gold_present: list[NormalizedPhrase]) -> list[SectionAssignment]:
    """Section assignment for each locatable phrase (unlocatable ones are
    skipped; a present phrase always locates)."""
    out = []
    for phrase in gold_present:
        offset = first_occurrence(phrase, doc)
        if offset is None:
            continue
        out.append(SectionAssignment(
            phrase=phrase, section=section_of(offset, len(doc.text)),
            first_char=offset))
    return out


@dataclass
class PositionalReport:
    gold_counts: list[int]
    miss_percent: list[float | None]
    soft_miss_percent: list[float | None]

    def to_dict(self) -> dict:
        return {"gold_counts": self.gold_counts,
                "miss_percent": self.miss_percent,
                "soft_miss_percent": self.soft_miss_percent}


def positional_report(corpus: "Corpus",
                      soft_score_fn: ScoreFunction = KMR) -> PositionalReport:
    """Per-section counts of gold present keyphrases and the percentage of
    them missed by the document's predictions.

    Sections with zero gold phrases report None (undefined) rather than 0.
    """
    gold_counts = [0] * N_SECTIONS
    missed = [0] * N_SECTIONS
    soft_missed = [0] * N_SECTIONS
    for doc, record in corpus.pairs():
        preds = [normalize(p) for p in dedup(record.phrases)]
        golds = [normalize(g) for g in doc.gold]
        located = assign_sections(doc, golds)
        for sa in located:
            s = sa.section - 1
            gold_counts[s] += 1
            exact_hit = any(sa.phrase.stems == p.stems for p in preds)
            if not exact_hit:
                missed[s] += 1
            if preds:
                soft = score_matrix(soft_score_fn, preds, [sa.phrase])
                soft_hit = bool(soft.max() > 0.0)
            else:
                soft_hit = False
            if not soft_hit:
                soft_missed[s] += 1
    miss_percent: list[float | None] = []
    soft_miss_percent: list[float | None] = []
    for s in range(N_SECTIONS):
        if gold_counts[s] == 0:
            miss_percent.append(None)
            soft_miss_percent.append(None)
        else:
            miss_percent.append(100.0 * missed[s] / gold_counts[s])
            soft_miss_percent.append(100.0 * soft_missed[s] / gold_counts[s])
    return PositionalReport(gold_counts=gold_counts, miss_percent=miss_percent,
                            soft_miss_percent=soft_miss_percent)
