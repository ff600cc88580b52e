"""Instrumented Hoare partition and Quickselect.

The partition is pinned to the classic two-pointer scheme of
Cormen-Leiserson-Rivest (pivot = leftmost element; the backward pointer
descends to a key <= pivot, the forward pointer ascends to a key >=
pivot; misplaced pairs are flipped while i < j, otherwise j is
returned). Every flip counts as exactly one key exchange. Small-n
distribution tests depend on this exact variant, so it must not be
"improved".

Keys may be any mutually comparable objects, but they must be pairwise
distinct; the probabilistic model has no ties and the partition's swap
law would change under ad-hoc tie handling.
"""

from dataclasses import dataclass
from fractions import Fraction

from .rng import make_rng


class DuplicateKeyError(ValueError):
    """Input contains equal keys; the model requires distinct keys."""


@dataclass(frozen=True)
class PartitionOutcome:
    """Result of one partition pass.

    split_index is the 1-based position of the last key of the left
    sub-list; on a full array it equals the left sub-list's size I_n.
    """
    split_index: int
    swaps: int


@dataclass(frozen=True)
class RunRecord:
    """One full Quickselect execution.

    `normalized` is exchanges/n held as an exact Fraction so records can
    be aggregated without float drift.
    """
    n: int
    rank: int
    exchanges: int
    normalized: Fraction
    selected_value: object


def check_distinct(items):
    if len(items) < 1:
        raise ValueError("need at least one key")
    if len(set(items)) != len(items):
        raise DuplicateKeyError("keys must be pairwise distinct")


def hoare_partition(a, lo, hi):
    """Partition a[lo..hi] (inclusive, 0-based bounds) around pivot a[lo].

    Mutates `a` in place. The returned split_index is 1-based: keys at
    0-based positions lo..split_index-1 end up smaller than every key at
    positions split_index..hi.
    """
    if hi <= lo:
        raise ValueError("segment must contain at least two keys")
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
            a[i], a[j] = a[j], a[i]
            swaps += 1
        else:
            return PartitionOutcome(split_index=j + 1, swaps=swaps)


def quickselect(items, rank):
    """Select the rank-th smallest key (rank is 1-based) and count swaps.

    Returns a RunRecord; the input sequence is not modified.
    """
    check_distinct(items)
    n = len(items)
    if not 1 <= rank <= n:
        raise ValueError(f"rank must be in 1..{n}, got {rank}")
    a = list(items)
    exchanges = 0
    lo, hi = 0, n - 1
    while lo < hi:
        out = hoare_partition(a, lo, hi)
        exchanges += out.swaps
        if rank <= out.split_index:
            hi = out.split_index - 1
        else:
            lo = out.split_index
    return RunRecord(
        n=n,
        rank=rank,
        exchanges=exchanges,
        normalized=Fraction(exchanges, n),
        selected_value=a[lo],
    )


def run_random(n, rng=None, seed=None, stream=0):
    """Run Quickselect on a uniform permutation of 1..n at a uniform rank.

    Pass either an existing Generator via `rng` or a (seed, stream)
    pair; the result is deterministic given the generator state.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if rng is None:
        rng = make_rng(seed if seed is not None else 0, stream)
    perm = [int(v) + 1 for v in rng.permutation(n)]
    rank = int(rng.integers(1, n + 1))
    return quickselect(perm, rank)
