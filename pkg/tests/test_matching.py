import itertools
import random

import numpy as np
import pytest

from keyscore.errors import MissingEmbeddingError, ValidationError
from keyscore.matching import (EXACT, KMR, ScoreFunction, ScoreKind,
                               TokenEmbeddingSet, apply_score, edit_distance,
                               embedding_greedy_score, exact_score, kmr,
                               score_matrix)
from tests.conftest import phrases


def recursive_edit_distance(a, b):
    """DP-free recursive oracle (insert/delete/substitute, unit costs)."""
    if not a:
        return len(b)
    if not b:
        return len(a)
    sub = recursive_edit_distance(a[1:], b[1:]) + (a[0] != b[0])
    dele = recursive_edit_distance(a[1:], b) + 1
    ins = recursive_edit_distance(a, b[1:]) + 1
    return min(sub, dele, ins)


class TestExact:
    def test_equal_stems(self):
        a, b = phrases("information retrieval", "information retrieval")
        assert exact_score(a, b) == 1.0

    def test_different(self):
        a, b = phrases("bgp", "routing")
        assert exact_score(a, b) == 0.0

    def test_unequal_length(self):
        a, b = phrases("routing protocols", "routing")
        assert exact_score(a, b) == 0.0


class TestEditDistance:
    def test_identical(self):
        assert edit_distance(["a", "b"], ["a", "b"]) == 0

    def test_one_substitution(self):
        assert edit_distance(["summarization", "model"],
                             ["summarization", "system"]) == 1

    def test_one_deletion(self):
        assert edit_distance(["web", "search", "engine"],
                             ["search", "engine"]) == 1

    def test_matches_recursive_oracle_exhaustively(self):
        # all token-sequence pairs of length <= 3 over a 3-symbol alphabet
        # (the full length-4 sweep runs in the acceptance suite)
        alphabet = ["x", "y", "z"]
        seqs = [list(s) for n in range(4)
                for s in itertools.product(alphabet, repeat=n)]
        for a in seqs:
            for b in seqs:
                assert edit_distance(a, b) == recursive_edit_distance(a, b)

    def test_symmetry_random(self):
        rng = random.Random(3)
        vocab = ["a", "b", "c", "d"]
        for _ in range(200):
            a = [rng.choice(vocab) for _ in range(rng.randint(0, 5))]
            b = [rng.choice(vocab) for _ in range(rng.randint(0, 5))]
            assert edit_distance(a, b) == edit_distance(b, a)


class TestKmr:
    def test_identity(self):
        a, b = phrases("neural model", "neural model")
        assert kmr(a, b) == 1.0

    def test_half(self):
        a, b = phrases("summarization model", "summarization system")
        assert kmr(a, b) == 0.5

    def test_disjoint(self):
        a, b = phrases("a b c", "x y z")
        assert kmr(a, b) == 0.0

    def test_max_length_normalization(self):
        a, b = phrases("web search engine", "search engine")
        assert kmr(a, b) == pytest.approx(1 - 1 / 3)

    def test_one_iff_equal_stems(self):
        a, b = phrases("routing", "routed")  # both stem to "rout"
        assert kmr(a, b) == 1.0
        c, d = phrases("routing", "router")
        assert kmr(c, d) < 1.0


class TestEmbeddingGreedy:
    def unit(self, *vecs):
        arr = np.asarray(vecs, dtype=np.float64)
        return arr / np.linalg.norm(arr, axis=1, keepdims=True)

    def test_identical_sets_score_one(self):
        e = TokenEmbeddingSet(("a",), self.unit([0.3, 0.4, 0.5]))
        assert embedding_greedy_score(e, e) == pytest.approx(1.0)

    def test_orthogonal_sets_clamp_to_zero(self):
        a = TokenEmbeddingSet(("a",), np.array([[1.0, 0.0]]))
        b = TokenEmbeddingSet(("b",), np.array([[0.0, 1.0]]))
        assert embedding_greedy_score(a, b, rescale_baseline=0.5) == 0.0

    def test_derived_two_thirds(self):
        a = TokenEmbeddingSet(("a",), np.array([[1.0, 0.0]]))
        b = TokenEmbeddingSet(("b", "c"), np.array([[1.0, 0.0], [0.0, 1.0]]))
        assert embedding_greedy_score(a, b) == pytest.approx(2 / 3)

    def test_dimension_mismatch(self):
        a = TokenEmbeddingSet(("a",), np.array([[1.0, 0.0]]))
        b = TokenEmbeddingSet(("b",), np.array([[1.0, 0.0, 0.0]]))
        with pytest.raises(ValidationError, match="dimension"):
            embedding_greedy_score(a, b)

    def test_non_unit_vectors_rejected(self):
        with pytest.raises(ValidationError, match="unit norm"):
            TokenEmbeddingSet(("a",), np.array([[1.0, 1.0]]))

    def test_rescaling(self):
        a = TokenEmbeddingSet(("a",), np.array([[1.0, 0.0]]))
        b = TokenEmbeddingSet(("b", "c"), np.array([[1.0, 0.0], [0.0, 1.0]]))
        raw = 2 / 3
        got = embedding_greedy_score(a, b, rescale_baseline=0.5)
        assert got == pytest.approx((raw - 0.5) / 0.5)


class TestApply:
    def test_kmr_above_threshold_passes(self):
        a, b = phrases("summar model", "summar system")
        assert apply_score(KMR, a, b) == 0.5

    def test_kmr_below_threshold_zeroed(self):
        a, b = phrases("one two three", "one x y")  # kmr = 1/3 < 0.4
        assert kmr(a, b) == pytest.approx(1 / 3)
        assert apply_score(KMR, a, b) == 0.0

    def test_exact_unchanged_by_threshold(self):
        a, b = phrases("same phrase", "same phrase")
        c, d = phrases("same phrase", "other phrase")
        assert apply_score(EXACT, a, b) == 1.0
        assert apply_score(EXACT, c, d) == 0.0

    def test_embedding_without_provider_names_phrase(self):
        fn = ScoreFunction(ScoreKind.EMBEDDING_GREEDY)
        a, b = phrases("missing phrase", "other")
        with pytest.raises(MissingEmbeddingError, match="missing phrase"):
            apply_score(fn, a, b)

    def test_invalid_threshold_rejected(self):
        with pytest.raises(ValidationError):
            ScoreFunction(ScoreKind.KMR, threshold=1.5)

    def test_baseline_only_for_embeddings(self):
        with pytest.raises(ValidationError):
            ScoreFunction(ScoreKind.KMR, rescale_baseline=0.5)


class TestProperties:
    def test_kmr_symmetry_identity_bounds(self):
        rng = random.Random(17)
        vocab = ["alpha", "beta", "gamma", "delta"]
        for _ in range(500):
            a, = phrases(" ".join(rng.choice(vocab)
                                  for _ in range(rng.randint(1, 4))))
            b, = phrases(" ".join(rng.choice(vocab)
                                  for _ in range(rng.randint(1, 4))))
            v_ab, v_ba = kmr(a, b), kmr(b, a)
            assert v_ab == v_ba
            assert 0.0 <= v_ab <= 1.0
            assert kmr(a, a) == 1.0
            t = apply_score(KMR, a, b)
            assert t == 0.0 or t >= 0.4

    def test_score_matrix_matches_pointwise_apply(self):
        preds = phrases("routing protocols", "bgp", "traffic engineering")
        golds = phrases("routing", "bgp", "models")
        for fn in (EXACT, KMR):
            matrix = score_matrix(fn, preds, golds)
            for i, p in enumerate(preds):
                for j, g in enumerate(golds):
                    assert matrix[i, j] == pytest.approx(apply_score(fn, p, g))

    def test_empty_sides_give_empty_matrix(self):
        golds = phrases("x")
        assert score_matrix(EXACT, [], golds).shape == (0, 1)
        assert score_matrix(EXACT, golds, []).shape == (1, 0)
