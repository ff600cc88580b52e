"""Exact finite-n combinatorics of the first partition pass and of the
total swap count.

Everything here is exact rational arithmetic (gmpy2.mpq when available,
fractions.Fraction otherwise); floats appear only when the caller asks
for the float-backed fast path of the expectation recurrence. The
brute-force enumeration over all n! permutations is the independent
oracle the closed forms are tested against.
"""

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from .quickselect import hoare_partition
from . import fastpath

try:
    from gmpy2 import mpq as _mpq
except ImportError:  # pragma: no cover - gmpy2 is a soft speedup
    _mpq = Fraction


def _as_fraction(q):
    return q if isinstance(q, Fraction) else Fraction(q.numerator, q.denominator)


@dataclass(frozen=True)
class RationalPmf:
    """Probability mass function with exact rational masses."""
    support: tuple
    mass: tuple

    def __post_init__(self):
        if any(m < 0 for m in self.mass):
            raise ValueError("negative mass")
        if sum(self.mass, Fraction(0)) != 1:
            raise ValueError("masses must sum to exactly 1")
        if list(self.support) != sorted(set(self.support)):
            raise ValueError("support must be strictly ascending")

    def as_dict(self):
        return dict(zip(self.support, self.mass))

    def mean(self):
        return sum((Fraction(s) * m for s, m in zip(self.support, self.mass)),
                   Fraction(0))

    def __getitem__(self, value):
        return self.as_dict().get(value, Fraction(0))


def split_pmf(n):
    """Law of the split index of the first partition pass.

    Mass 2/n at j=1 and 1/n at each j in 2..n-1: the split lands at 1
    exactly when the leftmost key is the smallest or second smallest.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    support = tuple(range(1, n))
    mass = tuple(Fraction(2, n) if j == 1 else Fraction(1, n) for j in support)
    return RationalPmf(support, mass)


def swaps_conditional_pmf(n, j):
    """Conditional law of first-pass swaps given split index j.

    Bernoulli(1/2) for j=1; hypergeometric Hyp(n-1; j, n-j) for j>=2,
    with mass C(j,k) C(n-j-1, n-j-k) / C(n-1, n-j) on
    k in min(1, j-1)..min(j, n-j).
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if not 1 <= j <= n - 1:
        raise ValueError(f"split index must be in 1..{n - 1}, got {j}")
    if j == 1:
        return RationalPmf((0, 1), (Fraction(1, 2), Fraction(1, 2)))
    k_lo = min(1, j - 1)
    k_hi = min(j, n - j)
    denom = comb(n - 1, n - j)
    support = tuple(range(k_lo, k_hi + 1))
    mass = tuple(Fraction(comb(j, k) * comb(n - j - 1, n - j - k), denom)
                 for k in support)
    return RationalPmf(support, mass)


def expected_swaps_first_pass(n):
    """E[T_n] by summing P(I_n=j) * E[T_n | I_n=j] over the split law.

    The conditional means are 1/2 (j=1) and j(n-j)/(n-1) (j>=2); the sum
    over j is done in exact integer arithmetic. Closed form: (n+1)/6.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    j = np.arange(2, n, dtype=np.int64)
    s = int(np.sum(j * (n - j)))  # sum_{j=2}^{n-1} j(n-j), exact in int64
    return Fraction(2, n) * Fraction(1, 2) + Fraction(s, n * (n - 1))


def harmonic(n):
    """H_n as an exact Fraction."""
    h = Fraction(0)
    for k in range(1, n + 1):
        h += Fraction(1, k)
    return h


def expected_moves_mahmoud(n, h_n=None):
    """Exact mean number of data moves, n + (2/3)H_n - 17/9 + 2H_n/(3n) - 2/(9n).

    This counts moves under a slightly different partition variant, so it
    is reported alongside 2*E[Y_n] but never asserted equal to it.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    h = harmonic(n) if h_n is None else _as_fraction(h_n)
    return (Fraction(n) + Fraction(2, 3) * h - Fraction(17, 9)
            + 2 * h / (3 * n) - Fraction(2, 9 * n))


@dataclass
class ExactExpectationTable:
    """Exact expectations indexed by n (entry [n] is for size n).

    e_t[n] = E[T_n] (first-pass swaps, 0 for n < 2), e_y[n] = E[Y_n]
    (total swaps), e_m[n] = E[M_n] (data moves per the reference closed
    form), h[n] = H_n. Entries are Fractions when exact, floats on the
    fast path.
    """
    n_max: int
    e_t: list
    e_y: list
    e_m: list
    h: list
    exact: bool = True

    def rows(self):
        for n in range(1, self.n_max + 1):
            yield n, self.e_t[n], self.e_y[n], self.e_m[n]

    def write_csv(self, fh):
        fh.write("n,e_y,e_y_frac,e_t,e_t_frac,e_m,e_m_frac\n")
        for n, et, ey, em in self.rows():
            fh.write("%d,%s,%s,%s,%s,%s,%s\n" % (
                n, format_decimal(ey), format_fraction(ey),
                format_decimal(et), format_fraction(et),
                format_decimal(em), format_fraction(em)))


def format_fraction(q):
    if isinstance(q, float):
        return repr(q)
    return f"{q.numerator}/{q.denominator}"


def format_decimal(q, digits=15):
    return f"{float(q):.{digits}g}"


def expected_total_swaps(n_max, exact=True):
    """E[Y_n] for n = 1..n_max via the split-law recurrence.

    E[Y_1] = 0 and, for n >= 2,
        E[Y_n] = (n+1)/6
                 + (1/n^2) [ 2(n-1) E[Y_{n-1}]
                             + sum_{j=2}^{n-1} j E[Y_j]
                             + sum_{i=2}^{n-2} i E[Y_i] ],
    where both sums are maintained as running prefix sums, so the whole
    table costs O(n_max) arithmetic operations. With exact=False the same
    recurrence runs in float64 (relative error ~n_max * eps).
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if exact:
        one = _mpq(1)
        zero = one * 0
        ey = [zero] * (n_max + 1)
        et = [zero] * (n_max + 1)
        h = [zero] * (n_max + 1)
        em = [zero] * (n_max + 1)
        s2 = zero          # sum_{j=2}^{m} j * E[Y_j], trailing at m = n-1
        s2_prev = zero     # same sum at m = n-2
        hn = zero
        for n in range(1, n_max + 1):
            hn = hn + one / n
            h[n] = hn
            em[n] = n + 2 * hn / 3 - _mpq(17, 9) + 2 * hn / (3 * n) - _mpq(2, 9 * n)
            if n == 1:
                continue
            et[n] = _mpq(n + 1, 6)
            val = et[n] + (2 * (n - 1) * ey[n - 1] + s2 + s2_prev) / (n * n)
            ey[n] = val
            s2_prev = s2
            s2 = s2 + n * val
        if _mpq is not Fraction:
            ey = [_as_fraction(q) for q in ey]
            et = [_as_fraction(q) for q in et]
            em = [_as_fraction(q) for q in em]
            h = [_as_fraction(q) for q in h]
        return ExactExpectationTable(n_max, et, ey, em, h, exact=True)

    ey = np.zeros(n_max + 1)
    et = np.zeros(n_max + 1)
    h = np.zeros(n_max + 1)
    em = np.zeros(n_max + 1)
    s2 = s2_prev = 0.0
    hn = 0.0
    for n in range(1, n_max + 1):
        hn += 1.0 / n
        h[n] = hn
        em[n] = n + 2 * hn / 3 - 17 / 9 + 2 * hn / (3 * n) - 2 / (9 * n)
        if n == 1:
            continue
        et[n] = (n + 1) / 6
        val = et[n] + (2 * (n - 1) * ey[n - 1] + s2 + s2_prev) / (n * n)
        ey[n] = val
        s2_prev = s2
        s2 += n * val
    return ExactExpectationTable(n_max, list(et), list(ey), list(em), list(h),
                                 exact=False)


MAX_ENUM_N = 9


@dataclass
class JointEnumeration:
    """Exact counts from brute force over every permutation of 1..n."""
    n: int
    it_counts: dict = field(default_factory=dict)   # (split, swaps) -> count
    y_counts: dict = field(default_factory=dict)    # total swaps -> count

    def split_marginal(self):
        total = sum(self.it_counts.values())
        agg = {}
        for (j, _), c in self.it_counts.items():
            agg[j] = agg.get(j, 0) + c
        support = tuple(sorted(agg))
        mass = tuple(Fraction(agg[j], total) for j in support)
        return RationalPmf(support, mass)

    def swaps_conditional(self, j):
        agg = {}
        for (jj, k), c in self.it_counts.items():
            if jj == j:
                agg[k] = agg.get(k, 0) + c
        total = sum(agg.values())
        support = tuple(sorted(agg))
        mass = tuple(Fraction(agg[k], total) for k in support)
        return RationalPmf(support, mass)

    def mean_first_pass_swaps(self):
        total = sum(self.it_counts.values())
        return Fraction(sum(k * c for (_, k), c in self.it_counts.items()), total)

    def mean_total_swaps(self):
        total = sum(self.y_counts.values())
        return Fraction(sum(y * c for y, c in self.y_counts.items()), total)


def enumerate_small(n, with_quickselect=True):
    """Tabulate (I_n, T_n) over all n! permutations and, optionally, Y_n
    over all n! * n (permutation, rank) pairs.

    Partition passes use the pure-Python reference; the full Quickselect
    sweep uses the compiled kernel (n=8 alone is ~320k selections).
    """
    if not 2 <= n <= MAX_ENUM_N:
        raise ValueError(
            f"enumeration is factorial in n; supported range is 2..{MAX_ENUM_N}")
    enum = JointEnumeration(n)
    perms = list(itertools.permutations(range(1, n + 1)))
    for perm in perms:
        out = hoare_partition(list(perm), 0, n - 1)
        key = (out.split_index, out.swaps)
        enum.it_counts[key] = enum.it_counts.get(key, 0) + 1
    if with_quickselect:
        mat = np.array(perms, dtype=np.int64)
        for rank in range(1, n + 1):
            values, swaps = fastpath.batch_quickselect(mat.copy(),
                np.full(len(perms), rank, dtype=np.int64))
            if not np.all(values == rank):
                raise AssertionError("enumeration found a selection error")
            for y in swaps:
                enum.y_counts[int(y)] = enum.y_counts.get(int(y), 0) + 1
    return enum
