"""Monte Carlo harness linking the finite-n algorithm to the limit law.

Simulation runs through the compiled kernels in fastpath; every study
takes an explicit generator (or seed), so reports are bitwise
reproducible. Kolmogorov-Smirnov distances against a solved CdfGrid use
linear interpolation between grid points; at the default grid of 4096
cells that contributes at most about ||f||_inf / 4096 ~ 1e-3, which the
acceptance tolerances absorb.
"""

import json
import time
from dataclasses import dataclass, asdict

import numpy as np

from . import exact, fastpath
from .rng import make_rng


def ks_distance_empirical(samples, cdf_grid):
    """sup_x |F_emp(x) - F(x)| with F linearly interpolated from the grid.

    The supremum is attained at a sample point, approached from either
    side of the empirical jump, so both one-sided gaps are checked.
    """
    xs = np.sort(np.asarray(samples, dtype=float))
    n = xs.size
    if n == 0:
        raise ValueError("need at least one sample")
    F = cdf_grid.interpolate(xs)
    upper = np.max(np.arange(1, n + 1) / n - F)
    lower = np.max(F - np.arange(0, n) / n)
    return float(max(upper, lower))


def ks_two_sample(a, b):
    """Two-sample Kolmogorov-Smirnov statistic."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    both = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, both, side="right") / a.size
    cdf_b = np.searchsorted(b, both, side="right") / b.size
    return float(np.max(np.abs(cdf_a - cdf_b)))


def ks_critical_two_sample(n_a, n_b, significance=0.001):
    """Asymptotic two-sample KS critical value c(sig) sqrt((n_a+n_b)/(n_a n_b))."""
    c = np.sqrt(-np.log(significance / 2.0) / 2.0)
    return float(c * np.sqrt((n_a + n_b) / (n_a * n_b)))


@dataclass
class ConvergenceRow:
    n: int
    runs: int
    ks_to_limit: float
    mean_normalized: float
    var_normalized_times_n: float
    wall_time: float


@dataclass
class ConvergenceReport:
    rows: list
    seed: object = None

    def write_csv(self, fh):
        fh.write("n,runs,ks,mean,nvar\n")
        for r in self.rows:
            fh.write(f"{r.n},{r.runs},{r.ks_to_limit:.17g},"
                     f"{r.mean_normalized:.17g},"
                     f"{r.var_normalized_times_n:.17g}\n")

    def to_json(self):
        return json.dumps({"seed": self.seed,
                           "rows": [asdict(r) for r in self.rows]}, indent=2)


def convergence_study(n_list, runs, cdf_grid, rng=None, seed=None, stream=0):
    """KS distance of Y_n/n to the limit, plus mean and n*variance, per n."""
    if runs < 1000:
        raise ValueError("runs must be >= 1000")
    if any(n < 2 for n in n_list):
        raise ValueError("every n must be >= 2")
    if rng is None:
        rng = make_rng(seed if seed is not None else 0, stream)
    rows = []
    for n in sorted(n_list):
        t0 = time.perf_counter()
        swaps = fastpath.simulate_swap_counts(n, runs, rng)
        xn = swaps / n
        rows.append(ConvergenceRow(
            n=n,
            runs=runs,
            ks_to_limit=ks_distance_empirical(xn, cdf_grid),
            mean_normalized=float(np.mean(xn)),
            var_normalized_times_n=float(n * np.var(xn, ddof=1)),
            wall_time=time.perf_counter() - t0,
        ))
    return ConvergenceReport(rows=rows, seed=seed)


def variance_scaling(n, runs, rng=None, seed=None, stream=0):
    """Sample variance of Y_n divided by n^2 (limit: 1/60)."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if runs < 10_000:
        raise ValueError("runs must be >= 10^4")
    if rng is None:
        rng = make_rng(seed if seed is not None else 0, stream)
    swaps = fastpath.simulate_swap_counts(n, runs, rng)
    return float(np.var(swaps, ddof=1) / n ** 2)


@dataclass
class MovesRow:
    n: int
    e_moves: float            # reference closed form for data moves
    two_e_y: float            # 2 E[Y_n], exact recurrence
    difference: float
    difference_per_n: float
    var_2y_over_n2: float     # Monte Carlo, nan when runs == 0


def moves_vs_exchanges_report(n_list, runs=0, rng=None, seed=None, stream=0,
                              exact_table=None):
    """Compare the moves closed form with twice the exchange mean.

    The two count different partition variants, so the difference is
    reported, never asserted away. With runs > 0 the Monte Carlo
    estimate of Var(2 Y_n)/n^2 is added (asymptote 1/15).
    """
    n_max = max(n_list)
    if exact_table is None:
        exact_table = exact.expected_total_swaps(n_max, exact=(n_max <= 20000))
    if rng is None and runs > 0:
        rng = make_rng(seed if seed is not None else 0, stream)
    rows = []
    for n in sorted(n_list):
        em = exact_table.e_m[n]
        two_ey = 2 * exact_table.e_y[n]
        diff = em - two_ey
        if runs > 0:
            swaps = fastpath.simulate_swap_counts(n, runs, rng)
            v = float(np.var(2 * swaps, ddof=1) / n ** 2)
        else:
            v = float("nan")
        rows.append(MovesRow(n=n, e_moves=float(em), two_e_y=float(two_ey),
                             difference=float(diff),
                             difference_per_n=float(diff / n),
                             var_2y_over_n2=v))
    return rows
