"""The numba and pure-numpy kernel paths must agree exactly."""

import random

import numpy as np

from keyscore import _kernels


def _random_seq(rng, max_len=6, alphabet=5):
    return np.array([rng.randrange(alphabet) for _ in range(rng.randint(0, max_len))],
                    dtype=np.int64)


def test_single_pair_paths_agree():
    rng = random.Random(7)
    for _ in range(500):
        a, b = _random_seq(rng), _random_seq(rng)
        assert _kernels._levenshtein_py(a, b) == _kernels.levenshtein(a, b)


def test_pairwise_paths_agree():
    rng = random.Random(11)
    seqs_a = [_random_seq(rng) for _ in range(12)]
    seqs_b = [_random_seq(rng) for _ in range(9)]
    flat_a = np.concatenate([np.zeros(0, np.int64)] + seqs_a)
    off_a = np.cumsum([0] + [s.size for s in seqs_a]).astype(np.int64)
    flat_b = np.concatenate([np.zeros(0, np.int64)] + seqs_b)
    off_b = np.cumsum([0] + [s.size for s in seqs_b]).astype(np.int64)
    got = _kernels.pairwise_levenshtein(flat_a, off_a, flat_b, off_b)
    want = _kernels._pairwise_py(flat_a, off_a, flat_b, off_b)
    assert np.array_equal(got, want)


def test_empty_sequences():
    empty = np.zeros(0, dtype=np.int64)
    three = np.array([1, 2, 3], dtype=np.int64)
    assert _kernels.levenshtein(empty, empty) == 0
    assert _kernels.levenshtein(empty, three) == 3
    assert _kernels.levenshtein(three, empty) == 3
