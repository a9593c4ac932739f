"""Stemmer checks against the published reference vocabulary pairs."""

import pytest

from keyscore.porter import stem

# (word, stem) pairs from the algorithm's published reference vocabulary,
# including the per-step illustration words.
REFERENCE_VECTORS = [
    ("caresses", "caress"), ("ponies", "poni"), ("ties", "ti"),
    ("caress", "caress"), ("cats", "cat"), ("feed", "feed"),
    ("agreed", "agre"), ("plastered", "plaster"), ("bled", "bled"),
    ("motoring", "motor"), ("sing", "sing"), ("conflated", "conflat"),
    ("troubled", "troubl"), ("sized", "size"), ("hopping", "hop"),
    ("tanned", "tan"), ("falling", "fall"), ("hissing", "hiss"),
    ("fizzed", "fizz"), ("failing", "fail"), ("filing", "file"),
    ("happy", "happi"), ("sky", "sky"), ("relational", "relat"),
    ("conditional", "condit"), ("rational", "ration"), ("valenci", "valenc"),
    ("hesitanci", "hesit"), ("digitizer", "digit"), ("radicalli", "radic"),
    ("differentli", "differ"), ("vileli", "vile"), ("analogousli", "analog"),
    ("vietnamization", "vietnam"), ("predication", "predic"),
    ("operator", "oper"), ("feudalism", "feudal"),
    ("decisiveness", "decis"), ("hopefulness", "hope"),
    ("callousness", "callous"), ("formaliti", "formal"),
    ("sensitiviti", "sensit"), ("sensibiliti", "sensibl"),
    ("triplicate", "triplic"), ("formative", "form"), ("formalize", "formal"),
    ("electriciti", "electr"), ("electrical", "electr"), ("hopeful", "hope"),
    ("goodness", "good"), ("revival", "reviv"), ("allowance", "allow"),
    ("inference", "infer"), ("airliner", "airlin"), ("gyroscopic", "gyroscop"),
    ("adjustable", "adjust"), ("defensible", "defens"), ("irritant", "irrit"),
    ("replacement", "replac"), ("adjustment", "adjust"),
    ("dependent", "depend"), ("adoption", "adopt"), ("communism", "commun"),
    ("activate", "activ"), ("effective", "effect"), ("bowdlerize", "bowdler"),
    ("probate", "probat"), ("rate", "rate"), ("cease", "ceas"),
    ("controll", "control"), ("roll", "roll"),
    # domain words used throughout the suite
    ("generalizations", "gener"), ("oscillators", "oscil"),
    ("archaeology", "archaeolog"), ("keyphrases", "keyphras"),
    ("generation", "gener"), ("evaluation", "evalu"),
    ("calibration", "calibr"), ("perplexity", "perplex"),
    ("routing", "rout"), ("clustering", "cluster"),
    ("identification", "identif"), ("summarization", "summar"),
    ("models", "model"), ("protocols", "protocol"),
]


@pytest.mark.parametrize("word, expected", REFERENCE_VECTORS)
def test_reference_vectors(word, expected):
    assert stem(word) == expected


def test_short_tokens_unchanged():
    for w in ["a", "by", "io", "bgp"[:2]]:
        assert stem(w) == w
    assert stem("bgp") == "bgp"  # no rule applies


# Classic Porter is not idempotent: step 1a re-strips a final "s" from
# stems like "decis", and step 5a shortens "agre". The reference
# implementation behaves identically, so the canonical outputs below are
# asserted as the correct behavior and blanket idempotence is recorded as
# an expected failure.
KNOWN_NON_IDEMPOTENT = {"agre": "agr", "decis": "deci", "callous": "callou",
                        "defens": "defen", "ceas": "cea", "keyphras": "keyphra"}


@pytest.mark.xfail(reason="classic Porter is not idempotent on all outputs",
                   strict=True)
def test_idempotent_on_all_reference_outputs():
    for word, _ in REFERENCE_VECTORS:
        once = stem(word)
        assert stem(once) == once


def test_idempotent_outside_known_exceptions():
    for word, _ in REFERENCE_VECTORS:
        once = stem(word)
        if once not in KNOWN_NON_IDEMPOTENT:
            assert stem(once) == once, word


def test_known_non_idempotent_outputs_match_reference():
    for word, expected in KNOWN_NON_IDEMPOTENT.items():
        assert stem(word) == expected
