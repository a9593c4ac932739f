"""Text normalization shared by every metric: tokenization, stemming,
duplicate removal and the present/absent check.

All phrase comparisons in the toolkit happen on stemmed lowercase tokens,
so the conventions pinned here (punctuation stripping, hyphen retention)
are the single source of truth for the rest of the package.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Iterable, Sequence

from .errors import ValidationError
from .porter import stem

if TYPE_CHECKING:
    from .corpus import Document, Keyphrase

__all__ = [
    "stem",
    "tokenize",
    "tokenize_with_offsets",
    "NormalizedPhrase",
    "PresenceLabel",
    "normalize",
    "dedup",
    "dedup_indices",
    "classify_presence",
    "doc_stem_index",
    "find_stem_subsequence",
]

_CHUNK = re.compile(r"\S+")


def tokenize_with_offsets(text: str) -> list[tuple[str, int]]:
    """Split ``text`` into lowercase word tokens, keeping character offsets.

    Tokens are whitespace-separated chunks with leading/trailing
    non-alphanumeric characters stripped; internal punctuation (hyphens,
    apostrophes) is retained. The offset is the index of the token's first
    retained character in the original text.
    """
    out = []
    for m in _CHUNK.finditer(text):
        raw = m.group()
        lo, hi = 0, len(raw)
        while lo < hi and not raw[lo].isalnum():
            lo += 1
        while hi > lo and not raw[hi - 1].isalnum():
            hi -= 1
        if lo == hi:
            continue
        out.append((raw[lo:hi].lower(), m.start() + lo))
    return out


def tokenize(text: str) -> list[str]:
    """Lowercase word tokens of ``text`` (see tokenize_with_offsets)."""
    return [tok for tok, _ in tokenize_with_offsets(text)]


class PresenceLabel(Enum):
    PRESENT = "present"
    ABSENT = "absent"


@dataclass(frozen=True)
class NormalizedPhrase:
    """A keyphrase reduced to its ordered stemmed lowercase tokens."""

    original: "Keyphrase"
    stems: tuple[str, ...]

    def __post_init__(self):
        if not self.stems or any(not s for s in self.stems):
            raise ValidationError(
                f"phrase normalizes to no usable tokens: {self.original!r}")


def normalize(phrase: "Keyphrase") -> NormalizedPhrase:
    """Stem each word token of ``phrase``, preserving order.

    Raises ValidationError for phrases with no word tokens (all punctuation).
    """
    if not phrase.tokens:
        raise ValidationError(f"phrase has no word tokens: {phrase.raw!r}")
    return NormalizedPhrase(phrase, tuple(stem(t) for t in phrase.tokens))


def dedup_indices(stem_seqs: Iterable[Sequence[str]]) -> list[int]:
    """Indices of the first occurrence of each distinct stems sequence."""
    seen = set()
    keep = []
    for i, stems in enumerate(stem_seqs):
        key = tuple(stems)
        if key not in seen:
            seen.add(key)
            keep.append(i)
    return keep


def dedup(phrases: Sequence["Keyphrase"]) -> list["Keyphrase"]:
    """Drop phrases whose stemmed form already occurred earlier in the list."""
    keep = dedup_indices(p.stemmed for p in phrases)
    return [phrases[i] for i in keep]


@dataclass(frozen=True)
class DocStemIndex:
    """Stemmed token sequence of a document plus per-token char offsets."""

    stems: tuple[str, ...]
    offsets: tuple[int, ...]


_index_lock = threading.Lock()


def doc_stem_index(doc: "Document") -> DocStemIndex:
    """Stemmed index of ``doc``, memoized on the document object.

    The cache is read-mostly: built once under a lock, then shared freely
    by concurrent evaluation workers.
    """
    index = getattr(doc, "_stem_index", None)
    if index is not None:
        return index
    with _index_lock:
        index = getattr(doc, "_stem_index", None)
        if index is None:
            pairs = tokenize_with_offsets(doc.text)
            index = DocStemIndex(
                stems=tuple(stem(t) for t, _ in pairs),
                offsets=tuple(off for _, off in pairs),
            )
            doc._stem_index = index
    return index


def find_stem_subsequence(haystack: Sequence[str], needle: Sequence[str]) -> int | None:
    """Index of the earliest contiguous occurrence of ``needle``, or None."""
    n = len(needle)
    if n == 0 or n > len(haystack):
        return None
    first = needle[0]
    for i in range(len(haystack) - n + 1):
        if haystack[i] == first and tuple(haystack[i:i + n]) == tuple(needle):
            return i
    return None


def classify_presence(phrase: NormalizedPhrase, doc: "Document") -> PresenceLabel:
    """PRESENT iff the phrase's stems occur contiguously in the stemmed document.

    Token-level matching deliberately: a raw substring check would call
    "rout" present inside "routine".
    """
    index = doc_stem_index(doc)
    pos = find_stem_subsequence(index.stems, phrase.stems)
    return PresenceLabel.PRESENT if pos is not None else PresenceLabel.ABSENT
