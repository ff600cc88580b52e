import math

import numpy as np
import pytest

from selectlab.experiments import ks_critical_two_sample
from selectlab.limit import kernel_support_max
from selectlab.rng import make_rng
from selectlab.sampler import (ALPHA, COALESCENCE_PROB, breakpoints, cdf_G,
                               cftp_sample, kernel_update_check,
                               quantile_G_inv, sample, summarize)


def test_alpha_constants():
    assert ALPHA == pytest.approx(math.sqrt(8 / 7) - 1)
    assert COALESCENCE_PROB == pytest.approx(1 / (2 * math.sqrt(14)) - 1 / 8)
    assert 0 < COALESCENCE_PROB < 1


@pytest.mark.parametrize("x", [0.0, 0.05, 0.125, 0.2, 0.25, 0.6, 1.0])
def test_cdf_G_is_distribution_function(x):
    top = float(kernel_support_max(x))
    t = np.linspace(0.0, top, 500)
    G = cdf_G(x, t)
    assert G[0] == 0.0
    assert G[-1] == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.diff(G) >= -1e-12)


def test_quantile_round_trip_fine():
    worst = 0.0
    for x in np.linspace(0.0, 1.0, 73):
        t = np.linspace(0.0, float(kernel_support_max(x)), 211)
        back = quantile_G_inv(np.full_like(t, x), cdf_G(x, t))
        worst = max(worst, float(np.max(np.abs(back - t))))
    assert worst < 1e-9


def test_quantile_branch_continuity():
    # step across every breakpoint; tolerance is loose because one
    # branch radical cancels at (x=1, u=d), see sampler module notes
    for x in np.linspace(0.0, 1.0, 101):
        for u in breakpoints(float(x)).values():
            u = float(u)
            if not 1e-9 < u < 1 - 1e-9:
                continue
            lo = quantile_G_inv(x, u - 1e-9)
            hi = quantile_G_inv(x, u + 1e-9)
            assert abs(hi - lo) < 1e-4


def test_quantile_endpoints_and_monotonicity():
    for x in (0.0, 0.1, 0.24, 0.5, 1.0):
        assert quantile_G_inv(x, 0.0) == 0.0
        assert quantile_G_inv(x, 1.0) == pytest.approx(
            float(kernel_support_max(x)), abs=1e-9)
        q = quantile_G_inv(np.full(1000, x), np.linspace(0, 1, 1000))
        assert np.all(np.diff(q) >= -1e-12)


def test_cftp_sample_accounting():
    rec = cftp_sample(make_rng(123, 0))
    assert rec == cftp_sample(make_rng(123, 0))
    assert rec.tau >= 1
    assert rec.draws_used == rec.tau + 1
    assert 0.0 <= rec.value <= 1.0


def test_sample_deterministic_and_in_range():
    a = sample(2000, seed=7, stream=2)
    b = sample(2000, seed=7, stream=2)
    assert np.array_equal(a, b)
    assert a.min() >= 0.0 and a.max() <= 1.0
    assert not np.array_equal(a, sample(2000, seed=7, stream=3))


def test_sample_statistics():
    values, taus = sample(100_000, seed=31, stream=0, return_tau=True)
    assert np.mean(values) == pytest.approx(0.5, abs=2e-3)
    assert np.var(values) == pytest.approx(1 / 60, rel=0.05)
    assert np.mean(taus) == pytest.approx(8 / ALPHA, rel=0.02)
    assert taus.min() >= 1


def test_sample_matches_scalar_path():
    # same law, different draw order: compare distributions, not values
    vec = sample(20_000, seed=5, stream=1)
    rng = make_rng(5, 9)
    scal = np.array([cftp_sample(rng).value for _ in range(5_000)])
    from selectlab.experiments import ks_two_sample
    assert ks_two_sample(vec, scal) < ks_critical_two_sample(20_000, 5_000)


def test_kernel_update_check():
    rng = make_rng(2024, 0)
    for x in (0.0, 0.5, 1.0):
        stat = kernel_update_check(x, 50_000, rng)
        assert stat < ks_critical_two_sample(50_000, 50_000)


def test_summarize():
    values, taus = sample(100, seed=1, stream=0, return_tau=True)
    s = summarize(values, taus)
    assert s["count"] == 100
    assert set(s) == {"count", "mean", "variance", "min", "max", "mean_tau"}
    assert "mean_tau" not in summarize(values)
