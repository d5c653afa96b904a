"""Symmetric and Muirhead means and their ergodic limits."""
import math
from dataclasses import dataclass

import numpy as np

from . import funcspace
from .errors import AllZeroAlpha, DimensionError, NegativeEntry, ZeroMeanExponent
from .permanent import DEFAULT_CAP, log_pmean


@dataclass(frozen=True)
class ScaledCoefficients:
    """Elementary symmetric values E_0..E_n stored as natural logs.

    ``log_values[k]`` is ``log E_k`` (``-inf`` when E_k = 0).  The
    ``mantissas``/``exponent_log`` view rescales everything by the largest
    value; coefficients more than ~700 e-folds below the peak underflow
    to 0 there but keep full precision in ``log_values``.
    """

    log_values: np.ndarray
    degree: int

    @property
    def exponent_log(self):
        return float(self.log_values.max())

    @property
    def mantissas(self):
        return np.exp(self.log_values - self.exponent_log)

    def value(self, k):
        return math.exp(self.log_values[k])


def elementary_symmetric(z):
    """All elementary symmetric polynomials of ``z`` via the product recurrence.

    Runs ``e_k <- e_k + z_i e_(k-1)`` on logarithms, so no value
    overflows or underflows whatever the length of ``z``.  O(n^2).
    """
    z = np.asarray(z, dtype=np.float64)
    if z.ndim != 1:
        raise DimensionError("z must be a vector")
    if np.any(z < 0) or not np.all(np.isfinite(z)):
        raise NegativeEntry("z must be finite and nonnegative")
    n = z.size
    L = np.full(n + 1, -np.inf)
    L[0] = 0.0
    with np.errstate(divide="ignore"):
        logz = np.log(z)
    for i in range(n):
        # The right side is evaluated before assignment: old e_(k-1) values.
        L[1 : i + 2] = np.logaddexp(L[1 : i + 2], logz[i] + L[0 : i + 1])
    return ScaledCoefficients(L, n)


def _log_binom(n, k):
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def log_symmetric_means(z):
    """``log sym_k(z)`` for k = 1..n from one recurrence pass."""
    coeffs = elementary_symmetric(z)
    n = coeffs.degree
    ks = np.arange(1, n + 1)
    log_binom = np.array([_log_binom(n, k) for k in ks])
    return (coeffs.log_values[1:] - log_binom) / ks


def symmetric_mean(z, k):
    """(E_k / C(n, k))^(1/k)."""
    n = np.size(z)
    if not 1 <= k <= n:
        raise IndexError(f"k={k} outside 1..{n}")
    coeffs = elementary_symmetric(z)
    return math.exp((coeffs.log_values[k] - _log_binom(n, k)) / k)


def rep_matrix(z, k):
    """k rows equal to ``z`` stacked over n - k rows of ones."""
    z = np.asarray(z, dtype=np.float64)
    n = z.size
    if not 1 <= k <= n:
        raise IndexError(f"k={k} outside 1..{n}")
    return np.vstack([np.tile(z, (k, 1)), np.ones((n - k, n))])


def muirhead_matrix(z, alpha):
    """Row i holds ``z_j ** alpha_i``."""
    z = np.asarray(z, dtype=np.float64)
    alpha = np.asarray(alpha, dtype=np.float64)
    return z[None, :] ** alpha[:, None]


def muirhead_mean(z, alpha, cap=DEFAULT_CAP):
    """pmean(M_alpha(z)) ** (n / sum(alpha))."""
    z = np.asarray(z, dtype=np.float64)
    alpha = np.asarray(alpha, dtype=np.float64)
    if z.shape != alpha.shape or z.ndim != 1:
        raise DimensionError("z and alpha must be vectors of equal length")
    if np.any(z < 0) or np.any(alpha < 0):
        raise NegativeEntry("z and alpha must be nonnegative")
    total = alpha.sum()
    if total == 0:
        raise AllZeroAlpha("alpha must not be all zero")
    lp = log_pmean(muirhead_matrix(z, alpha), cap=cap)
    return math.exp(lp * z.size / total)


def hs_limit(g, w, c, tol=funcspace.ROOT_RTOL):
    """Ergodic limit of sym_k(g(x), ..., g(T^(n-1) x)) for k/n -> c.

    Returns ``(limit, r)`` where ``r`` solves sum_i w_i g_i / (g_i + r) = c.
    """
    if not 0.0 < c < 1.0:
        raise ValueError(f"c must lie in (0, 1), got {c!r}")
    g = np.asarray(g, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if g.shape != w.shape:
        raise DimensionError("g and w must have equal length")
    if not np.all(g > 0):
        raise ValueError("g must be positive")
    r = funcspace.solve_ratio_root(g, np.ones_like(g), w, c, tol)
    log_limit = (
        math.log(c)
        + (1.0 - c) / c * math.log((1.0 - c) / r)
        + float(w @ np.log(g + r)) / c
    )
    return math.exp(log_limit), r


def muirhead_limit(g, mu, h, nu, tol=funcspace.DEFAULT_TOL):
    """[smean(g^h)]^(1 / sum_j nu_j h_j) on the grid f_ij = g_i ** h_j."""
    g = np.asarray(g, dtype=np.float64)
    h = np.asarray(h, dtype=np.float64)
    mean_h = float(np.asarray(nu, dtype=np.float64) @ h)
    if not mean_h > 0:
        raise ZeroMeanExponent("exponent function must have positive mean")
    f = funcspace.GridFunction(g[:, None] ** h[None, :], mu, nu)
    return funcspace.functional_scaling_mean(f, tol) ** (1.0 / mean_h)
