"""Prebuilt embedding caches in the consumer's wire format.

One JSON object per line: {"phrase", "model_id", "tokens", "vectors"},
floats at full precision. Building is deterministic: same phrases file and
model give a byte-identical cache; duplicate phrases collapse to the first
occurrence.
"""

from __future__ import annotations

import json
from pathlib import Path

from .encoders import EncoderRegistry


def iter_phrases(path) -> list[str]:
    """Unique non-empty lines of a phrases file, first-occurrence order."""
    seen = set()
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        phrase = line.strip()
        if phrase and phrase not in seen:
            seen.add(phrase)
            out.append(phrase)
    return out


def cache_entry(encoder, phrase: str) -> str:
    tokens, vectors = encoder.encode(phrase)
    return json.dumps({"phrase": phrase, "model_id": encoder.model_id,
                       "tokens": tokens, "vectors": vectors.tolist()},
                      ensure_ascii=False, sort_keys=True)


def build_cache(phrases_path, model_id: str, out_path,
                registry: EncoderRegistry | None = None) -> int:
    """Embed every unique phrase of the file; returns the entry count."""
    registry = registry or EncoderRegistry()
    encoder = registry.get(model_id)
    phrases = iter_phrases(phrases_path)
    with open(out_path, "w", encoding="utf-8") as fh:
        for phrase in phrases:
            try:
                fh.write(cache_entry(encoder, phrase) + "\n")
            except Exception as exc:
                raise RuntimeError(f"failed to embed {phrase!r}: {exc}") from exc
    return len(phrases)
