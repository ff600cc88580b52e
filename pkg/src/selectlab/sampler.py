"""Perfect simulation from the limit law by coupling from the past.

The one-step kernel phi(x, .) is bounded below by alpha on (1/8, 1/4)
uniformly in the state x, with alpha = sqrt(8/7) - 1. Splitting off
that minorizing rectangle gives a multigamma coupler: with probability
alpha/8 every chain jumps to the same draw U/8 + 1/8, otherwise the
chain moves by inverting the residual distribution function G_x. All
chains therefore coalesce at the first backward time with a
minorization hit, which is Geom(alpha/8) = Geom(1/(2 sqrt 14) - 1/8)
distributed, and running a single chain forward from that time yields
an exact draw from the stationary law of
X =_d sqrt(U) X + sqrt(U)(1 - sqrt(U)).

The twelve-branch closed-form quantile G_x^{-1} below was derived by
inverting G_x segment by segment; the round-trip identity
G_x^{-1}(G_x(t)) = t is enforced to 1e-9 in the test suite, which is
the guard against transcription slips.
"""

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .limit import kernel_cdf, kernel_support_max, NumericConsistencyError
from .rng import make_rng

ALPHA = math.sqrt(8.0 / 7.0) - 1.0
# = 1/(2 sqrt 14) - 1/8, the per-step probability that all chains couple
COALESCENCE_PROB = ALPHA / 8.0

_QUANTILE_SLACK = 1e-9


@dataclass(frozen=True)
class LimitSample:
    """One exact draw: value, backward coalescence time, uniforms consumed."""
    value: float
    tau: int
    draws_used: int


def cdf_G(x, t):
    """Distribution function G_x of the residual (non-coupling) move.

    G_x(t) = (8/(8-alpha)) (F_x(t) - alpha * max{0, min{t - 1/8, 1/8}}),
    which is 0 at t=0 and exactly 1 at the kernel's supremum
    ((1+x)/2)^2. Broadcasts over arrays.
    """
    t = np.asarray(t, dtype=float)
    sub = ALPHA * np.clip(t - 0.125, 0.0, 0.125)
    out = 8.0 / (8.0 - ALPHA) * (kernel_cdf(x, t) - sub)
    if out.ndim == 0:
        return float(out)
    return out


def breakpoints(x):
    """The u-axis breakpoints a_x..g_x of the quantile branches.

    Returns a dict; entries that are outside their x-regime are still
    evaluated (the closed forms are total), callers select what applies.
    """
    x = np.asarray(x, dtype=float)
    den = 8.0 - ALPHA
    s2 = np.sqrt(4 * x * x + 8 * x + 2)      # 2 sqrt((1+x)^2 - 1/2)
    s1 = np.sqrt(np.maximum(x * x + 2 * x, 0.0))  # sqrt((1+x)^2 - 1)
    return {
        "a": 8 * x * x / den,
        "b": 4 * (2 - (1 + x) * s2) / den,
        "c": (8 * (1 - (1 + x) * s1) - ALPHA) / den,
        "d": (2 + 2 * x - s2) ** 2 / (2 * den),
        "e": (8 * x * x + (1 - 8 * x) * ALPHA) / den,
        "f": (4 * x * x + 8 * x + 2 - ALPHA - 4 * (1 + x) * s1) / den,
        "g": (8 * x * x - ALPHA) / den,
    }


@njit(cache=True)
def _g_inv_scalar(x, u):
    """Closed-form G_x^{-1}(u); twelve cases over three x-regimes.

    Branch 1 inverts the pre-kink part of F_x (t < x), branches 2/4 the
    post-kink part without/after the minorization window, branches 3/5
    the parts inside the window (post-/pre-kink), branch 6 the pre-kink
    part beyond the window. Intervals are half-open on the right.
    """
    alpha = ALPHA  # compile-time constant under numba
    den = 8.0 - alpha
    onepx = 1.0 + x
    if u <= 0.0:
        return 0.0
    if u > 1.0:
        u = 1.0

    if x < 0.125:
        a = 8.0 * x * x / den
        b = 4.0 * (2.0 - onepx * math.sqrt(4 * x * x + 8 * x + 2)) / den
        c = (8.0 * (1.0 - onepx * math.sqrt(x * x + 2 * x)) - alpha) / den
        if u < a:
            branch = 1
        elif u < b:
            branch = 2
        elif u < c:
            branch = 3
        else:
            branch = 4
    elif x < 0.25:
        s2 = math.sqrt(4 * x * x + 8 * x + 2)
        d = (2.0 + 2.0 * x - s2) ** 2 / (2.0 * den)
        e = (8.0 * x * x + (1.0 - 8.0 * x) * alpha) / den
        c = (8.0 * (1.0 - onepx * math.sqrt(x * x + 2 * x)) - alpha) / den
        if u < d:
            branch = 1
        elif u < e:
            branch = 5
        elif u < c:
            branch = 3
        else:
            branch = 4
    else:
        s2 = math.sqrt(4 * x * x + 8 * x + 2)
        d = (2.0 + 2.0 * x - s2) ** 2 / (2.0 * den)
        f = (4 * x * x + 8 * x + 2 - alpha
             - 4.0 * onepx * math.sqrt(x * x + 2 * x)) / den
        g = (8.0 * x * x - alpha) / den
        if u < d:
            branch = 1
        elif u < f:
            branch = 5
        elif u < g:
            branch = 6
        else:
            branch = 4

    if branch == 1:
        return ((alpha / 8.0 - 1.0) * u
                + onepx / 4.0 * math.sqrt(2.0 * den) * math.sqrt(u))
    if branch == 2:
        q = 8.0 * (1.0 - u) + alpha * u
        return (64.0 * onepx ** 4 - q * q) / (256.0 * onepx * onepx)
    if branch == 3:
        rad = (4.0 * (4.0 + alpha * alpha) * onepx * onepx
               - 2.0 * alpha * den * (1.0 - u) - 4.0 * alpha * alpha)
        if rad < 0.0:
            rad = 0.0
        return (2.0 * alpha * alpha + alpha * den * (1.0 - u)
                - 16.0 * onepx * onepx
                + 4.0 * onepx * math.sqrt(rad)) / (8.0 * alpha * alpha)
    if branch == 4:
        q = den * (1.0 - u)
        return (64.0 * onepx ** 4 - q * q) / (256.0 * onepx * onepx)
    if branch == 5:
        q = alpha * u + alpha - 8.0 * u
        rad = (4.0 * alpha * alpha * onepx * onepx
               - 2.0 * (1.0 + alpha) * q)
        if rad < 0.0:
            rad = 0.0
        return (4.0 * alpha * onepx * onepx + (1.0 + alpha) * q
                + 2.0 * onepx * math.sqrt(rad)) / (8.0 * (1.0 + alpha) ** 2)
    # branch 6
    return ((alpha / 8.0 - 1.0) * u
            + onepx / 4.0 * math.sqrt(2.0)
            * math.sqrt(8.0 * u + alpha * (1.0 - u))
            - alpha / 8.0)


@njit(cache=True)
def _g_inv_array(xs, us, out):
    for i in range(xs.shape[0]):
        out[i] = _g_inv_scalar(xs[i], us[i])
    return out


def quantile_G_inv(x, u, validate=True):
    """G_x^{-1}(u) for x, u in [0,1]; broadcasts like numpy ufuncs.

    With validate=True the result is checked against the support
    [0, ((1+x)/2)^2] (slack 1e-9) and clipped into it; violations raise
    NumericConsistencyError with the worst offender.
    """
    x_arr, u_arr = np.broadcast_arrays(np.asarray(x, dtype=float),
                                       np.asarray(u, dtype=float))
    shape = x_arr.shape
    xs = np.ascontiguousarray(x_arr).ravel()
    us = np.ascontiguousarray(u_arr).ravel()
    out = np.empty_like(xs)
    _g_inv_array(xs, us, out)
    if validate:
        top = kernel_support_max(xs)
        low = float(np.min(out))
        over = float(np.max(out - top))
        if low < -_QUANTILE_SLACK or over > _QUANTILE_SLACK:
            i = int(np.argmin(out)) if low < -_QUANTILE_SLACK \
                else int(np.argmax(out - top))
            raise NumericConsistencyError(
                "quantile branch left its t-interval: "
                f"x={xs[i]:.17g} u={us[i]:.17g} t={out[i]:.17g}")
        out = np.clip(out, 0.0, top)
    out = out.reshape(shape)
    if out.ndim == 0:
        return float(out[()])
    return out


def cftp_sample(rng):
    """One exact draw from the limit law (Algorithm: coupling from the past).

    tau ~ Geom(alpha/8) on {1, 2, ...} is the number of steps looked
    backward until the first coupling update (one RNG call; same law as
    a Bernoulli trial loop). The coupling update at time -(tau-1) sets
    X = U/8 + 1/8, then the tau - 1 more recent updates are residual
    (non-coupling) moves by the quantile G^{-1}, bringing the chain to
    time 0. Total uniforms consumed: tau + 1.
    """
    tau = int(rng.geometric(COALESCENCE_PROB))
    x = rng.random() / 8.0 + 0.125
    for _ in range(tau - 1):
        x = float(quantile_G_inv(x, rng.random()))
    return LimitSample(value=x, tau=tau, draws_used=tau + 1)


def sample(count, rng=None, seed=None, stream=0, chunk=1_000_000,
           return_tau=False):
    """`count` exact draws, vectorized over chains.

    Chains within a chunk advance in lockstep (one uniform per still
    running chain per sweep), so the output is deterministic given
    (seed, stream, chunk). Returns values, or (values, taus).
    """
    if rng is None:
        rng = make_rng(seed if seed is not None else 0, stream)
    values = np.empty(count)
    taus = np.empty(count, dtype=np.int64)
    done = 0
    while done < count:
        b = min(chunk, count - done)
        t = rng.geometric(COALESCENCE_PROB, size=b).astype(np.int64)
        x = rng.random(b) / 8.0 + 0.125
        remaining = t - 1
        active = np.nonzero(remaining > 0)[0]
        scratch = np.empty(b)
        while active.size:
            u = rng.random(active.size)
            xs = x[active]
            _g_inv_array(xs, u, scratch[:active.size])
            x[active] = scratch[:active.size]
            remaining[active] -= 1
            active = active[remaining[active] > 0]
        bad = (x < -_QUANTILE_SLACK) | (x > 1.0 + _QUANTILE_SLACK)
        if np.any(bad):
            raise NumericConsistencyError("CFTP state left [0, 1]")
        np.clip(x, 0.0, 1.0, out=x)
        values[done:done + b] = x
        taus[done:done + b] = t
        done += b
    if return_tau:
        return values, taus
    return values


def summarize(values, taus=None):
    d = {
        "count": int(values.size),
        "mean": float(np.mean(values)),
        "variance": float(np.var(values, ddof=1)),
        "min": float(np.min(values)),
        "max": float(np.max(values)),
    }
    if taus is not None:
        d["mean_tau"] = float(np.mean(taus))
    return d


def kernel_update_check(x, runs, rng):
    """Two-sample KS statistic between multigamma updates and direct draws.

    Multigamma: B(U/8 + 1/8) + (1-B) G_x^{-1}(U), B ~ Ber(alpha/8).
    Direct: sqrt(U) x + sqrt(U)(1 - sqrt(U)). Equal in distribution, so
    the statistic should sit below the two-sample KS critical value.
    """
    from .experiments import ks_two_sample
    b = rng.random(runs) < COALESCENCE_PROB
    u = rng.random(runs)
    multigamma = np.where(b, u / 8.0 + 0.125, quantile_G_inv(x, u))
    su = np.sqrt(rng.random(runs))
    direct = su * x + su * (1.0 - su)
    return ks_two_sample(multigamma, direct)
