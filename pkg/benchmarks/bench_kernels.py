#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

The workload mirrors corpus evaluation with the KMR kernel: all-pairs
word-level edit distances between stemmed phrase sets. Both paths are
always imported directly (the KEYSCORE_NO_NUMBA flag only switches which
one the package binds), so one run compares them side by side.

Usage: python benchmarks/bench_kernels.py [--pairs 2000] [--max-len 6]
"""

import argparse
import random
import time

import numpy as np

from keyscore import _kernels


def make_phrase_sets(rng, n_docs, phrases_per_side, max_len, vocab_size):
    sets = []
    for _ in range(n_docs):
        def side():
            seqs = [np.array([rng.randrange(vocab_size)
                              for _ in range(rng.randint(1, max_len))],
                             dtype=np.int64)
                    for _ in range(phrases_per_side)]
            flat = np.concatenate(seqs)
            off = np.cumsum([0] + [s.size for s in seqs]).astype(np.int64)
            return flat, off
        sets.append((side(), side()))
    return sets


def run(fn, sets):
    t0 = time.perf_counter()
    acc = 0
    for (fa, oa), (fb, ob) in sets:
        acc += int(fn(fa, oa, fb, ob).sum())
    return time.perf_counter() - t0, acc


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--docs", type=int, default=400,
                        help="synthetic documents (phrase-set pairs)")
    parser.add_argument("--phrases", type=int, default=12,
                        help="phrases per side")
    parser.add_argument("--max-len", type=int, default=6,
                        help="max tokens per phrase")
    parser.add_argument("--seed", type=int, default=1234)
    args = parser.parse_args()

    if not _kernels.USING_NUMBA:
        print("numba unavailable or disabled; benchmarking the numpy path only")

    rng = random.Random(args.seed)
    sets = make_phrase_sets(rng, args.docs, args.phrases, args.max_len, 50)
    n_pairs = args.docs * args.phrases * args.phrases
    print(f"workload: {args.docs} documents, {args.phrases}x{args.phrases} "
          f"phrase pairs each ({n_pairs} edit distances)")

    numpy_time, numpy_acc = run(_kernels._pairwise_py, sets)
    print(f"numpy fallback : {numpy_time:8.3f} s "
          f"({n_pairs / numpy_time:,.0f} pairs/s)")

    if _kernels.USING_NUMBA:
        _ = run(_kernels._pairwise_numba, sets[:2])  # JIT warmup
        numba_time, numba_acc = run(_kernels._pairwise_numba, sets)
        assert numba_acc == numpy_acc, "paths disagree"
        print(f"numba @njit    : {numba_time:8.3f} s "
              f"({n_pairs / numba_time:,.0f} pairs/s)")
        print(f"speedup        : {numpy_time / numba_time:8.1f}x "
              "(identical results)")


if __name__ == "__main__":
    main()
