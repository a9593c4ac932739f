import json
import random

import pytest

from keyscore.corpus import Keyphrase
from keyscore.textnorm import NormalizedPhrase, normalize


def phrases(*raws: str) -> list[NormalizedPhrase]:
    return [normalize(Keyphrase.from_raw(r)) for r in raws]


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")
    return str(path)


VOCAB = ["alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta",
         "iota", "kappa", "lam", "mu", "nu", "xi", "omicron", "pi", "rho",
         "sigma", "tau", "upsilon"]


def random_phrase(rng: random.Random, max_tokens: int = 4) -> str:
    n = rng.randint(1, max_tokens)
    return " ".join(rng.choice(VOCAB) for _ in range(n))


def random_phrase_set(rng: random.Random, max_phrases: int = 6,
                      max_tokens: int = 4) -> list[str]:
    n = rng.randint(0, max_phrases)
    out = []
    seen = set()
    for _ in range(n):
        p = random_phrase(rng, max_tokens)
        if p not in seen:  # pre-deduplicated, as soft_f expects
            seen.add(p)
            out.append(p)
    return out


@pytest.fixture
def corpus_files(tmp_path):
    """Write documents/predictions JSONL files and return their paths."""

    def make(docs, preds):
        docs_path = write_jsonl(tmp_path / "docs.jsonl", docs)
        preds_path = write_jsonl(tmp_path / "preds.jsonl", preds)
        return docs_path, preds_path

    return make
