"""Compiled kernels for bulk simulation and exhaustive enumeration.

These mirror quickselect.hoare_partition / quickselect.quickselect on
int64 arrays; the test suite checks agreement with the pure-Python
reference exhaustively for small n and on random instances for large n.
All Monte Carlo at n >= 10**3 goes through here, pure Python would be
two orders of magnitude too slow for the desk-scale experiments.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def partition_int64(a, lo, hi):
    """Hoare partition of a[lo..hi] around a[lo]; returns (j, swaps)."""
    x = a[lo]
    i = lo - 1
    j = hi + 1
    swaps = 0
    while True:
        j -= 1
        while a[j] > x:
            j -= 1
        i += 1
        while a[i] < x:
            i += 1
        if i < j:
            tmp = a[i]
            a[i] = a[j]
            a[j] = tmp
            swaps += 1
        else:
            return j, swaps


@njit(cache=True)
def quickselect_int64(a, rank):
    """In-place Quickselect for the rank-th smallest (1-based).

    Returns (selected_value, total_swaps).
    """
    lo = 0
    hi = a.shape[0] - 1
    target = rank - 1
    exchanges = 0
    while lo < hi:
        j, s = partition_int64(a, lo, hi)
        exchanges += s
        if target <= j:
            hi = j
        else:
            lo = j + 1
    return a[lo], exchanges


@njit(cache=True)
def batch_quickselect(perms, ranks):
    """Swap counts for many (permutation, rank) pairs.

    perms: (runs, n) int64, consumed in place. ranks: (runs,) 1-based.
    Returns (values, swaps) int64 arrays.
    """
    runs = perms.shape[0]
    values = np.empty(runs, dtype=np.int64)
    swaps = np.empty(runs, dtype=np.int64)
    for r in range(runs):
        v, s = quickselect_int64(perms[r], ranks[r])
        values[r] = v
        swaps[r] = s
    return values, swaps


def simulate_swap_counts(n, runs, rng, chunk=2000):
    """Y_n for `runs` independent (uniform permutation, uniform rank) draws.

    Chunked so memory stays ~chunk*n int64; deterministic given rng state.
    """
    out = np.empty(runs, dtype=np.int64)
    base = np.arange(1, n + 1, dtype=np.int64)
    done = 0
    while done < runs:
        b = min(chunk, runs - done)
        perms = np.tile(base, (b, 1))
        perms = rng.permuted(perms, axis=1)
        ranks = rng.integers(1, n + 1, size=b).astype(np.int64)
        _, swaps = batch_quickselect(perms, ranks)
        out[done:done + b] = swaps
        done += b
    return out
