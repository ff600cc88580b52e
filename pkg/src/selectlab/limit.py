"""Numerics of the limit law X =_d sqrt(U) X + sqrt(U)(1 - sqrt(U)).

Contents: exact rational moments, the one-step kernel (CDF F_x and
density phi(x,.) of sqrt(U) x + sqrt(U)(1 - sqrt(U))), fixed-point
solvers for the distribution function and the density, the tail bound,
and the convergence-rate constants tau_p / kappa_p / omega_eps.

Numeric hygiene: branch boundaries of the kernel are algebraically
exact but float-rounded, so radicands in [-RADICAND_SLACK, 0) are
clamped to 0; anything more negative in a live branch raises.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

RADICAND_SLACK = 1e-12


class NumericConsistencyError(ArithmeticError):
    """A quantity left its mathematically guaranteed range."""


def _guarded_sqrt(r):
    """sqrt with the shared clamp for slightly negative radicands."""
    r = np.asarray(r, dtype=float)
    if np.any(r < -RADICAND_SLACK):
        raise NumericConsistencyError(
            f"radicand below -{RADICAND_SLACK:g}: min={float(np.min(r)):g}")
    return np.sqrt(np.maximum(r, 0.0))


# ---------------------------------------------------------------------------
# moments


@dataclass(frozen=True)
class MomentTable:
    """Exact rational moments E[X^k], k = 0..k_max."""
    k_max: int
    moments: tuple

    def __getitem__(self, k):
        return self.moments[k]

    def variance(self):
        return self.moments[2] - self.moments[1] ** 2


def moments(k_max):
    """E[X^k] for k = 0..k_max via the solved recursion

        E[X^k] = 2 (k+2)! (k-1)! sum_{i=0}^{k-1} E[X^i] / ((2k-i+2)! i!).

    Exact Fractions; in particular E[X] = 1/2 and E[X^2] = 4/15.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    fact = [math.factorial(i) for i in range(2 * k_max + 3)]
    m = [Fraction(1)]
    for k in range(1, k_max + 1):
        s = sum((m[i] / (fact[2 * k - i + 2] * fact[i]) for i in range(k)),
                Fraction(0))
        m.append(2 * fact[k + 2] * fact[k - 1] * s)
    return MomentTable(k_max, tuple(m))


def moment_closure_residual(table):
    """Exact residuals of the unsolved moment identity

        E[X^k] = 2 (k+1)! k! sum_{i=0}^{k} E[X^i] / ((2k-i+2)! i!),

    one Fraction per k = 1..k_max; all must be 0.
    """
    fact = [math.factorial(i) for i in range(2 * table.k_max + 3)]
    res = []
    for k in range(1, table.k_max + 1):
        s = sum((table[i] / (fact[2 * k - i + 2] * fact[i])
                 for i in range(k + 1)), Fraction(0))
        res.append(2 * fact[k + 1] * fact[k] * s - table[k])
    return res


# ---------------------------------------------------------------------------
# one-step kernel


def kernel_support_max(x):
    """Supremum ((1+x)/2)^2 of the support of sqrt(U)x + sqrt(U)(1-sqrt(U))."""
    return ((1.0 + np.asarray(x, dtype=float)) / 2.0) ** 2


def kernel_cdf(x, t):
    """F_x(t) = P(sqrt(U) x + sqrt(U)(1 - sqrt(U)) <= t) for x in [0,1].

    Piecewise: 0 for t < 0; ((1+x-sqrt((1+x)^2-4t))/2)^2 for t < x;
    1-(1+x) sqrt((1+x)^2-4t) for t < ((1+x)/2)^2; else 1. Broadcasts
    over numpy arrays in x and t.
    """
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(x < -RADICAND_SLACK) or np.any(x > 1 + RADICAND_SLACK):
        raise ValueError("x must lie in [0, 1]")
    x, t = np.broadcast_arrays(x, t)
    rad = (1.0 + x) ** 2 - 4.0 * t
    low = t < x
    mid = (~low) & (t < kernel_support_max(x))
    s = np.sqrt(np.maximum(rad, 0.0))  # rad >= 0 wherever low or mid holds
    out = np.where(low, ((1.0 + x - s) / 2.0) ** 2,
                   np.where(mid, 1.0 - (1.0 + x) * s, 1.0))
    out = np.where(t < 0, 0.0, out)
    if out.ndim == 0:
        return float(out)
    return out


def kernel_g(x, t):
    """g(x,t) = (1+x)/sqrt((1+x)^2 - 4t), defined for t < ((1+x)/2)^2."""
    x = np.asarray(x, dtype=float)
    s = _guarded_sqrt((1.0 + x) ** 2 - 4.0 * np.asarray(t, dtype=float))
    with np.errstate(divide="ignore"):
        return (1.0 + x) / s


def kernel_density(x, t):
    """Density phi(x, .) of sqrt(U) x + sqrt(U)(1-sqrt(U)), evaluated at t.

    2 g(x,t) for p_t < x <= t, g(x,t) - 1 for t < x <= 1, else 0, with
    p_t = 2 sqrt(t) - 1. At x exactly equal to p_t the (integrable)
    singularity is reported as +inf.
    """
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    x, t = np.broadcast_arrays(x, t)
    p_t = 2.0 * _guarded_sqrt(t) - 1.0
    inner = (x > p_t) & (x <= t)
    right = (x > t) & (x <= 1.0)
    rad = (1.0 + x) ** 2 - 4.0 * t
    with np.errstate(divide="ignore"):
        g = (1.0 + x) / np.sqrt(np.maximum(rad, 0.0))
    out = np.where(inner, 2.0 * g, np.where(right, g - 1.0, 0.0))
    sing = np.isclose(x, p_t, rtol=0.0, atol=1e-15) & (t >= 0) & (x >= 0)
    out = np.where(sing & (x <= 1.0) & ~right, np.inf, out)
    out = np.where(np.asarray(t) < 0, 0.0, out)
    if out.ndim == 0:
        return float(out)
    return out


# ---------------------------------------------------------------------------
# distribution function solver


@dataclass
class CdfGrid:
    """Grid approximation of the distribution function F of X.

    `values` are the fixed-point iterates at `points`; `cell_masses` is
    the final piecewise-uniform measure on the m cells between grid
    points (midpoints in `cell_midpoints`). evaluate() pushes that
    measure through the kernel once, which is more accurate at
    off-grid query points than interpolating `values`.
    """
    points: np.ndarray
    values: np.ndarray
    residual: float
    iterations: int
    converged: bool
    cell_masses: np.ndarray
    cell_midpoints: np.ndarray

    def evaluate(self, t):
        return push_measure(self.cell_masses, self.cell_midpoints, t)

    def interpolate(self, t):
        return np.interp(t, self.points, self.values, left=0.0, right=1.0)

    def fig1_table(self):
        """20 x 8 matrix of F(col + row), rows 0..0.095 step 0.005,
        columns 0.0..0.7 step 0.1 (the compact table layout)."""
        rows = np.arange(20) * 0.005
        cols = np.arange(8) * 0.1
        return self.evaluate(cols[None, :] + rows[:, None])

    def write_csv(self, fh):
        fh.write("t,F\n")
        for t, v in zip(self.points, self.values):
            fh.write(f"{t:.17g},{v:.17g}\n")


def push_measure(masses, midpoints, t, chunk=256):
    """One application of the kernel map: sum_i w_i F_{x_i}(t)."""
    t = np.asarray(t, dtype=float)
    flat = np.atleast_1d(t).ravel()
    out = np.empty_like(flat)
    for s in range(0, flat.size, chunk):
        block = flat[s:s + chunk]
        out[s:s + chunk] = kernel_cdf(midpoints[None, :],
                                      block[:, None]) @ masses
    if t.ndim == 0:
        return float(out[0])
    return out.reshape(t.shape)


def cdf_solve(grid_size=4096, tol=1e-7, max_iter=200):
    """Fixed-point iteration F_{k+1}(t) = int F_x(t) dmu_k(x).

    mu_0 is a point mass at 0 and each iterate is re-discretized as
    piecewise-uniform mass on `grid_size` cells with the kernel read at
    cell midpoints. The map contracts at rate E[sqrt(U)] = 2/3, so
    roughly 40 iterations reach 1e-7.
    """
    if grid_size < 64:
        raise ValueError("grid_size must be >= 64")
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = grid_size
    points = np.linspace(0.0, 1.0, m + 1)
    mids = (points[:-1] + points[1:]) / 2.0
    # kernel matrix K[j, i] = F_{x_i}(t_j), built once in row blocks
    K = np.empty((m + 1, m))
    step = max(1, (1 << 22) // m)
    for s in range(0, m + 1, step):
        K[s:s + step] = kernel_cdf(mids[None, :], points[s:s + step, None])

    values = kernel_cdf(0.0, points)       # push of the point mass at 0
    residual = np.inf
    it = 0
    while it < max_iter:
        masses = np.diff(values)
        new = K @ masses
        residual = float(np.max(np.abs(new - values)))
        values = new
        it += 1
        if residual < tol:
            break
    converged = residual < tol
    return CdfGrid(points=points, values=values, residual=residual,
                   iterations=it, converged=converged,
                   cell_masses=np.diff(values), cell_midpoints=mids)


def rde_two_sided_cdf(grid, t, nodes=512):
    """Push `grid`'s measure once through the two-sided recursive map

        1_{V<=U} U X + 1_{V>U} (1-U) X' + U(1-U)

    by Gauss-Legendre quadrature in u. Used to cross-check that both
    forms of the recursive distributional equation share the fixed
    point; independent of kernel_cdf.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    u, w = np.polynomial.legendre.leggauss(nodes)
    u = 0.5 * (u + 1.0)
    w = 0.5 * w

    def F(z):
        return np.interp(z, grid.points, grid.values, left=0.0, right=1.0)

    shift = u * (1.0 - u)
    out = np.empty_like(t)
    for j, tj in enumerate(t):
        left = u * F((tj - shift) / u)
        right = (1.0 - u) * F((tj - shift) / (1.0 - u))
        out[j] = float(np.sum(w * (left + right)))
    return out


# ---------------------------------------------------------------------------
# density solver


@dataclass
class DensityGrid:
    """Piecewise-constant approximation of the density f of X.

    `points` are cell midpoints of a uniform grid on [0,1]; `values`
    the fixed-point iterate there. mass/mean/second_moment are the
    integrals of the piecewise-constant representation.
    """
    points: np.ndarray
    values: np.ndarray
    mass: float
    mean: float
    second_moment: float
    residual: float
    iterations: int
    converged: bool

    @property
    def max_value(self):
        return float(np.max(self.values))

    def write_csv(self, fh):
        fh.write("t,f\n")
        for t, v in zip(self.points, self.values):
            fh.write(f"{t:.17g},{v:.17g}\n")


def _density_weights(m):
    """W[j, i] = int over cell i of phi(x, t_j) dx, integrated exactly.

    Uses the primitive G(x, t) = sqrt((1+x)^2 - 4t) of g(x, .), so the
    inverse-square-root singularity at x = p_t never meets a quadrature
    rule. Region 1 is x in (p_t, t) with weight 2 g, region 2 is
    x in (t, 1) with weight g - 1.
    """
    edges = np.linspace(0.0, 1.0, m + 1)
    a = edges[:-1][None, :]
    b = edges[1:][None, :]
    t = ((edges[:-1] + edges[1:]) / 2.0)[:, None]
    p_t = 2.0 * np.sqrt(t) - 1.0

    def G(x):
        return np.sqrt(np.maximum((1.0 + x) ** 2 - 4.0 * t, 0.0))

    lo1 = np.maximum(a, p_t)
    hi1 = np.minimum(b, t)
    r1 = np.where(hi1 > lo1, 2.0 * (G(hi1) - G(lo1)), 0.0)

    lo2 = np.maximum(a, t)
    hi2 = b
    r2 = np.where(hi2 > lo2, (G(hi2) - G(lo2)) - (hi2 - lo2), 0.0)
    return r1 + r2


def density_solve(grid_size=2048, tol=1e-9, max_iter=400):
    """Fixed-point iteration of the density map starting from f == 1.

    f_{k+1}(t) = 2 int_{p_t}^t g f + int_t^1 (g - 1) f, with per-cell
    integrals done analytically against the piecewise-constant iterate.
    The discretized operator leaks a trace of mass each sweep (the exact
    map is mass preserving), so the iterate is renormalized to unit mass
    after every application; without this the residual stalls near 4e-7.
    """
    if grid_size < 64:
        raise ValueError("grid_size must be >= 64")
    m = grid_size
    h = 1.0 / m
    mids = (np.arange(m) + 0.5) * h
    W = _density_weights(m)
    f = np.ones(m)
    residual = np.inf
    it = 0
    while it < max_iter:
        new = W @ f
        new /= np.sum(new) * h
        residual = float(np.max(np.abs(new - f)))
        f = new
        it += 1
        if residual < tol:
            break
    mass = float(np.sum(f) * h)
    mean = float(np.sum(f * mids) * h)
    second = float(np.sum(f * mids ** 2) * h)
    return DensityGrid(points=mids, values=f, mass=mass, mean=mean,
                       second_moment=second, residual=residual,
                       iterations=it, converged=residual < tol)


# ---------------------------------------------------------------------------
# right derivative at 0


def right_derivative_at_zero(method="series", k_max=200, moment_table=None,
                             samples=None):
    """f'_r(0) = E[2/(1+X)^2] = 2 sum_k (-1)^k (k+1) E[X^k] ~ 0.911364.

    series: alternating sum of exact moments; consecutive partial sums
    bracket the limit, the estimate is the midpoint of the last bracket
    and (estimate, half_gap) is returned. montecarlo: plain average of
    2/(1+X)^2 over perfect-sampler draws passed via `samples`; returns
    (estimate, standard_error).
    """
    if method == "series":
        table = moment_table if moment_table is not None else moments(k_max)
        if table.k_max < k_max:
            raise ValueError("moment table too short for requested k_max")
        partial = Fraction(0)
        prev = None
        for k in range(k_max + 1):
            prev = partial
            partial += 2 * (-1) ** k * (k + 1) * table[k]
        lo, hi = sorted((prev, partial))
        return float((lo + hi) / 2), float(hi - lo) / 2
    if method == "montecarlo":
        if samples is None:
            raise ValueError("montecarlo method needs perfect-sampler draws")
        vals = 2.0 / (1.0 + np.asarray(samples, dtype=float)) ** 2
        est = float(np.mean(vals))
        se = float(np.std(vals) / math.sqrt(len(vals)))
        return est, se
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# tail bound and rate constants


def tail_bound(eps, k):
    """Upper bound 2^{k(k+3)/4} eps^{k/2} for P(X >= 1 - eps)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if k < 1 or int(k) != k:
        raise ValueError("k must be a positive integer")
    return 2.0 ** (k * (k + 3) / 4.0) * eps ** (k / 2.0)


@dataclass(frozen=True)
class RateConstants:
    """Convergence-rate constants.

    l_p rate: l_p(Y_n/n, X) <= kappa_p / sqrt(n), with
    tau_p = (1/2 + Gamma(p/2+1)/2^{p/2+1})^{1/p} and
    kappa_p = (2p+3)/(2p-1) (7 + tau_p). KS rate (when eps is set):
    d_KS(Y_n/n, X) <= omega_eps n^{-1/2+eps} with
    omega_eps = (1/(2 eps))^{2 eps} (||f||_inf kappa_p)^{1-2 eps}
    at p = -1 + 1/(2 eps).
    """
    p: float
    tau_p: float
    kappa_p: float
    eps: float = None
    omega_eps: float = None
    density_bound_used: float = None

    def ks_ceiling(self, n):
        if self.omega_eps is None:
            raise ValueError("no KS constants; use ks_rate_bound")
        return self.omega_eps * float(n) ** (-0.5 + self.eps)


def rate_constants(p):
    """tau_p and kappa_p for the l_p convergence rate."""
    if p < 1:
        raise ValueError("p must be >= 1")
    tau = (0.5 + math.gamma(p / 2 + 1) / 2 ** (p / 2 + 1)) ** (1.0 / p)
    kappa = (2 * p + 3) / (2 * p - 1) * (7 + tau)
    return RateConstants(p=p, tau_p=tau, kappa_p=kappa)


def ks_rate_bound(eps, density_bound=109.0):
    """Full constant set for the Kolmogorov-Smirnov rate at exponent eps."""
    if not 0 < eps <= 0.25:
        raise ValueError("eps must lie in (0, 1/4]")
    if density_bound <= 0:
        raise ValueError("density_bound must be positive")
    p = -1 + 1 / (2 * eps)
    base = rate_constants(p)
    omega = ((1 / (2 * eps)) ** (2 * eps)
             * (density_bound * base.kappa_p) ** (1 - 2 * eps))
    return RateConstants(p=p, tau_p=base.tau_p, kappa_p=base.kappa_p,
                         eps=eps, omega_eps=omega,
                         density_bound_used=density_bound)
