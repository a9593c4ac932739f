"""Hot numeric kernels: word-level Levenshtein distance, single pair and
all-pairs over integer-encoded token sequences.

Two implementations are kept side by side:

  * a numba @njit path (default when numba imports cleanly), and
  * a pure-numpy path, selected by setting KEYSCORE_NO_NUMBA=1.

Both produce identical integers; benchmarks/bench_kernels.py compares them.
Token sequences are encoded as int64 arrays by the caller; ragged sets use
CSR-style (flat values + offsets) layout.
"""

from __future__ import annotations

import os

import numpy as np


def _levenshtein_py(a: np.ndarray, b: np.ndarray) -> int:
    """Vectorized DP over rows; insertion scan done via a running-minimum
    identity: cur[j] = min_k<=j (cand[k] + (j - k))."""
    n, m = a.size, b.size
    if n == 0:
        return int(m)
    if m == 0:
        return int(n)
    idx = np.arange(m + 1, dtype=np.int64)
    prev = idx.copy()
    cand = np.empty(m + 1, dtype=np.int64)
    for i in range(n):
        cand[0] = i + 1
        np.minimum(prev[1:] + 1, prev[:-1] + (b != a[i]), out=cand[1:])
        cand -= idx
        np.minimum.accumulate(cand, out=cand)
        cand += idx
        prev, cand = cand, prev
    return int(prev[m])


def _pairwise_py(a_flat, a_off, b_flat, b_off) -> np.ndarray:
    na = a_off.size - 1
    nb = b_off.size - 1
    out = np.zeros((na, nb), dtype=np.int64)
    for i in range(na):
        ai = a_flat[a_off[i]:a_off[i + 1]]
        for j in range(nb):
            out[i, j] = _levenshtein_py(ai, b_flat[b_off[j]:b_off[j + 1]])
    return out


def _lev_core(a, b):  # pragma: no cover - exercised through the njit wrapper
    n = a.shape[0]
    m = b.shape[0]
    if n == 0:
        return m
    if m == 0:
        return n
    prev = np.empty(m + 1, dtype=np.int64)
    cur = np.empty(m + 1, dtype=np.int64)
    for j in range(m + 1):
        prev[j] = j
    for i in range(n):
        cur[0] = i + 1
        ai = a[i]
        for j in range(1, m + 1):
            cost = prev[j - 1]
            if b[j - 1] != ai:
                cost += 1
            dele = prev[j] + 1
            ins = cur[j - 1] + 1
            best = cost
            if dele < best:
                best = dele
            if ins < best:
                best = ins
            cur[j] = best
        prev, cur = cur, prev
    return prev[m]


USING_NUMBA = False
_disabled = os.environ.get("KEYSCORE_NO_NUMBA", "").strip().lower() in {"1", "true", "yes"}

if not _disabled:
    try:
        from numba import njit

        _lev_numba = njit("int64(int64[:], int64[:])", cache=True, nogil=True)(_lev_core)

        @njit("int64[:,:](int64[:], int64[:], int64[:], int64[:])",
              cache=True, nogil=True)
        def _pairwise_numba(a_flat, a_off, b_flat, b_off):  # pragma: no cover
            na = a_off.shape[0] - 1
            nb = b_off.shape[0] - 1
            out = np.zeros((na, nb), dtype=np.int64)
            for i in range(na):
                ai = a_flat[a_off[i]:a_off[i + 1]]
                for j in range(nb):
                    out[i, j] = _lev_numba(ai, b_flat[b_off[j]:b_off[j + 1]])
            return out

        USING_NUMBA = True
    except ImportError:  # pragma: no cover
        pass

if USING_NUMBA:
    def levenshtein(a: np.ndarray, b: np.ndarray) -> int:
        return int(_lev_numba(a, b))

    pairwise_levenshtein = _pairwise_numba
else:  # pure-numpy path
    levenshtein = _levenshtein_py
    pairwise_levenshtein = _pairwise_py
