"""Acceptance suite: one test (and one reported pass/fail line) per
criterion. Tolerances and seeds are pinned; every expected value below
was computed from an independent oracle (exhaustive enumeration, exact
rational arithmetic, or the closed-form constants) before being frozen.
"""

from fractions import Fraction

import numpy as np
import pytest

from selectlab import exact, experiments, limit, sampler
from selectlab.rng import make_rng

# Reference CDF table in the --fig1 layout: F(col + row), rows
# 0.000..0.095 step 0.005, columns 0.0..0.7 step 0.1; 4-decimal values.
FIG1_TABLE = np.array([
    [0.0000, 0.0054, 0.0268, 0.0811, 0.2044, 0.4400, 0.7655, 0.9768],
    [0.0000, 0.0060, 0.0285, 0.0853, 0.2133, 0.4550, 0.7811, 0.9809],
    [0.0000, 0.0067, 0.0303, 0.0896, 0.2224, 0.4703, 0.7963, 0.9844],
    [0.0001, 0.0074, 0.0322, 0.0942, 0.2318, 0.4858, 0.8112, 0.9874],
    [0.0002, 0.0081, 0.0341, 0.0989, 0.2415, 0.5016, 0.8256, 0.9900],
    [0.0003, 0.0089, 0.0362, 0.1038, 0.2516, 0.5175, 0.8396, 0.9922],
    [0.0004, 0.0097, 0.0383, 0.1089, 0.2619, 0.5337, 0.8531, 0.9939],
    [0.0006, 0.0106, 0.0405, 0.1142, 0.2726, 0.5500, 0.8661, 0.9954],
    [0.0008, 0.0115, 0.0428, 0.1198, 0.2835, 0.5665, 0.8784, 0.9965],
    [0.0010, 0.0125, 0.0453, 0.1255, 0.2948, 0.5831, 0.8902, 0.9975],
    [0.0012, 0.0135, 0.0478, 0.1314, 0.3064, 0.5999, 0.9014, 0.9982],
    [0.0015, 0.0146, 0.0505, 0.1376, 0.3184, 0.6167, 0.9120, 0.9987],
    [0.0018, 0.0157, 0.0533, 0.1440, 0.3306, 0.6335, 0.9218, 0.9991],
    [0.0021, 0.0169, 0.0562, 0.1506, 0.3432, 0.6503, 0.9310, 0.9994],
    [0.0025, 0.0181, 0.0593, 0.1575, 0.3561, 0.6672, 0.9396, 0.9996],
    [0.0029, 0.0194, 0.0626, 0.1647, 0.3693, 0.6839, 0.9474, 0.9997],
    [0.0033, 0.0208, 0.0660, 0.1721, 0.3829, 0.7006, 0.9546, 0.9998],
    [0.0038, 0.0222, 0.0695, 0.1797, 0.3967, 0.7171, 0.9611, 0.9999],
    [0.0043, 0.0237, 0.0732, 0.1877, 0.4109, 0.7335, 0.9670, 0.9999],
    [0.0049, 0.0252, 0.0770, 0.1959, 0.4253, 0.7496, 0.9722, 1.0000],
])


def test_criterion_01_split_law(record_criterion):
    worst = None
    for n in range(2, 9):
        enum = exact.enumerate_small(n, with_quickselect=False)
        if enum.split_marginal().as_dict() != exact.split_pmf(n).as_dict():
            worst = n
    record_criterion(1, "exact split law", worst is None,
                     "exhaustive, n=2..8" if worst is None
                     else f"mismatch at n={worst}")


def test_criterion_02_conditional_swap_law(record_criterion):
    bad = []
    for n in range(2, 9):
        enum = exact.enumerate_small(n, with_quickselect=False)
        for j in range(1, n):
            if (enum.swaps_conditional(j).as_dict()
                    != exact.swaps_conditional_pmf(n, j).as_dict()):
                bad.append((n, j))
    record_criterion(2, "conditional swap law", not bad,
                     "Ber(1/2) and Hyp(n-1;j,n-j), n=2..8" if not bad
                     else f"mismatch at {bad[:3]}")


def test_criterion_03_exact_mean_oracle(record_criterion):
    table = exact.expected_total_swaps(7)
    mismatch = []
    for n in range(2, 8):
        enum_mean = exact.enumerate_small(n).mean_total_swaps()
        if table.e_y[n] != enum_mean:
            mismatch.append((n, str(table.e_y[n]), str(enum_mean)))
    first_pass_ok = all(
        exact.expected_swaps_first_pass(n) == Fraction(n + 1, 6)
        for n in range(2, 10**4 + 1))
    detail = "first-pass (n+1)/6 ok to 1e4; " + (
        "recurrence == enumeration for n<=7" if not mismatch else
        "recurrence vs enumeration differ: " + "; ".join(
            f"n={n}: {a} vs {b}" for n, a, b in mismatch))
    record_criterion(3, "exact mean oracle",
                     first_pass_ok and not mismatch, detail)


def test_criterion_04_moments(record_criterion, moment_table):
    ok = (moment_table[1] == Fraction(1, 2)
          and moment_table[2] == Fraction(4, 15)
          and moment_table.variance() == Fraction(1, 60))
    record_criterion(4, "exact moments", ok,
                     "E[X]=1/2, E[X^2]=4/15, Var=1/60")


def test_criterion_05_cdf_table(record_criterion, cdf_grid):
    err = np.abs(cdf_grid.fig1_table() - FIG1_TABLE)
    spot = (abs(cdf_grid.evaluate(0.355) - 0.1376) < 5e-4
            and abs(cdf_grid.evaluate(0.500) - 0.4400) < 5e-4
            and abs(cdf_grid.evaluate(0.700) - 0.9768) < 5e-4)
    ok = bool(err.max() < 5e-4) and spot
    record_criterion(5, "CDF reference table", ok,
                     f"max |dF| = {err.max():.2e} over 160 entries")


def test_criterion_06_sampler_statistics(record_criterion, cdf_grid,
                                         perfect_samples):
    values, taus = perfect_samples
    mean = float(np.mean(values))
    var = float(np.var(values, ddof=1))
    ks = experiments.ks_distance_empirical(values, cdf_grid)
    mtau = float(np.mean(taus))
    ok = (abs(mean - 0.5) < 5e-4
          and abs(var - 1 / 60) < 0.05 / 60
          and ks < 2e-3
          and abs(mtau - 8 / sampler.ALPHA) < 0.03 * 8 / sampler.ALPHA)
    record_criterion(
        6, "perfect sampler stats", ok,
        f"mean={mean:.5f} var={var:.6f} ks={ks:.2e} mean_tau={mtau:.2f}")


def test_criterion_07_kernel_identity(record_criterion):
    rng = make_rng(20130601, 7)
    crit = experiments.ks_critical_two_sample(10**6, 10**6)
    stats = {x: sampler.kernel_update_check(x, 10**6, rng)
             for x in (0.0, 0.3, 1.0)}
    ok = all(s < crit for s in stats.values())
    record_criterion(7, "kernel identity", ok,
                     "KS " + " ".join(f"{x}:{s:.2e}" for x, s in stats.items())
                     + f" < {crit:.2e}")


def test_criterion_08_quantile_round_trip(record_criterion):
    worst = 0.0
    for x in np.linspace(0.0, 1.0, 100):
        t = np.linspace(0.0, float(limit.kernel_support_max(x)), 100)
        back = sampler.quantile_G_inv(np.full_like(t, x), sampler.cdf_G(x, t))
        worst = max(worst, float(np.max(np.abs(back - t))))
    record_criterion(8, "quantile round trip", worst < 1e-9,
                     f"max |G^-1(G(t)) - t| = {worst:.2e} on 100x100 grid")


def test_criterion_09_variance_scaling(record_criterion):
    v = experiments.variance_scaling(10**4, 10**5, seed=20130601, stream=1)
    ok = 0.0150 <= v <= 0.0183 and 0.060 <= 4 * v <= 0.073
    record_criterion(9, "variance scaling", ok,
                     f"Var(Y)/n^2 = {v:.6f}, Var(2Y)/n^2 = {4 * v:.5f}")


def test_criterion_10_ks_convergence_trend(record_criterion, cdf_grid):
    report = experiments.convergence_study([100, 1000, 10000], 10**5,
                                           cdf_grid, seed=20130601, stream=2)
    ks = [r.ks_to_limit for r in report.rows]
    bound = limit.ks_rate_bound(0.25, density_bound=109.0)
    below = all(r.ks_to_limit < bound.ks_ceiling(r.n) for r in report.rows)
    ratio = ks[0] / ks[2]
    ok = ks[0] > ks[1] > ks[2] and 5 <= ratio <= 20 and below
    record_criterion(
        10, "KS convergence trend", ok,
        "ks=" + "/".join(f"{v:.4f}" for v in ks) + f" ratio={ratio:.1f}")


def test_criterion_11_density_properties(record_criterion):
    grid = limit.density_solve()
    low = grid.points <= 0.25
    ok = (grid.converged
          and abs(grid.mass - 1.0) < 1e-3
          and abs(grid.mean - 0.5) < 1e-3
          and grid.values[0] < 1e-2
          and grid.values[-1] < 1e-2
          and bool(np.all(np.diff(grid.values[low]) >= -1e-9))
          and 3.0 <= grid.max_value <= 4.0
          and grid.max_value <= 109.0)
    record_criterion(
        11, "density properties", ok,
        f"mass={grid.mass:.6f} mean={grid.mean:.6f} max={grid.max_value:.3f}")


def test_criterion_12_right_derivative(record_criterion, moment_table,
                                       perfect_samples):
    series, _ = limit.right_derivative_at_zero(moment_table=moment_table)
    mc, se = limit.right_derivative_at_zero(
        method="montecarlo", samples=perfect_samples[0][:10**6])
    ok = (abs(series - 0.911364) < 1e-3
          and abs(mc - 0.911364) < 1e-3
          and abs(series - mc) < 2e-3)
    record_criterion(12, "right derivative", ok,
                     f"series={series:.6f} mc={mc:.6f} (se {se:.1e})")


def test_criterion_13_tail_bound(record_criterion, perfect_samples):
    values = perfect_samples[0][:10**6]
    checks = []
    for eps, k in ((0.1, 2), (0.05, 2), (0.05, 4)):
        emp = float(np.mean(values >= 1 - eps))
        checks.append((eps, k, emp, limit.tail_bound(eps, k)))
    ok = all(emp <= bound for _, _, emp, bound in checks)
    record_criterion(13, "tail bound", ok,
                     " ".join(f"P(X>={1 - e:g})={emp:.1e}<={b:.2f}"
                              for e, _, emp, b in checks))
