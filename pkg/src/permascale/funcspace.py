"""Scaling of positive functions on a weighted product grid.

A :class:`GridFunction` samples ``f(x_i, y_j)`` with row weights ``mu``
and column weights ``nu``.  Functions of the row index only (resp. column
index only) play the role of the two sub-sigma-algebras, so conditional
expectations are weighted row and column averages.
"""
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BoundsViolated,
    BracketFailure,
    DimensionError,
    MaxIterExceeded,
    NonPositiveEntry,
)

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 100_000
ROOT_RTOL = 1e-13
_WEIGHT_TOL = 1e-12


def _probability_vector(w, name):
    w = np.array(w, dtype=np.float64)
    if w.ndim != 1 or w.size == 0:
        raise DimensionError(f"{name} must be a non-empty vector")
    if not np.all(w > 0):
        raise ValueError(f"{name} must have positive entries")
    if abs(w.sum() - 1.0) > _WEIGHT_TOL:
        raise ValueError(f"{name} must sum to 1, sums to {w.sum()!r}")
    return w


@dataclass(frozen=True)
class GridFunction:
    values: np.ndarray
    mu: np.ndarray
    nu: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        mu = _probability_vector(self.mu, "mu")
        nu = _probability_vector(self.nu, "nu")
        if values.shape != (mu.size, nu.size):
            raise DimensionError(f"values shape {values.shape} != ({mu.size}, {nu.size})")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "nu", nu)

    @classmethod
    def uniform(cls, values):
        values = np.asarray(values, dtype=np.float64)
        m, n = values.shape
        return cls(values, np.full(m, 1.0 / m), np.full(n, 1.0 / n))

    @property
    def shape(self):
        return self.values.shape

    def to_json(self):
        return json.dumps(
            {"mu": self.mu.tolist(), "nu": self.nu.tolist(), "values": self.values.tolist()}
        )

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text)
        if not isinstance(obj, dict) or set(obj) != {"mu", "nu", "values"}:
            raise ValueError('GridFunction JSON needs exactly the keys "mu", "nu", "values"')
        return cls(obj["values"], obj["mu"], obj["nu"])


def geometric_mean(v, w):
    """exp(sum_i w_i log v_i)."""
    v = np.asarray(v, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if v.shape != w.shape:
        raise DimensionError(f"shape mismatch {v.shape} vs {w.shape}")
    if not np.all(v > 0):
        raise NonPositiveEntry("geometric mean needs positive entries")
    return float(np.exp(w @ np.log(v)))


def conditional_expectation(f, axis):
    """Average out the other coordinate.

    ``axis="rows"`` gives the function of the row index ``sum_j nu_j f_ij``;
    ``axis="cols"`` gives ``sum_i mu_i f_ij``.
    """
    if axis == "rows":
        return f.values @ f.nu
    if axis == "cols":
        return f.mu @ f.values
    raise ValueError(f"axis must be 'rows' or 'cols', got {axis!r}")


@dataclass(frozen=True)
class FunctionalSinkhorn:
    phi: np.ndarray
    psi: np.ndarray
    g: GridFunction
    iterations: int
    residual: float
    kappa: float

    def reconstruct(self):
        return self.phi[:, None] * self.g.values * self.psi[None, :]


def functional_contraction_factor(f):
    v = f.values
    delta = 2.0 * math.log(v.max() / v.min())
    return math.tanh(delta / 4.0) ** 2


def ray_iterates(f, phi0=None):
    """Yield ``(phi, psi)`` along the orbit of the ray map.

    One step sends ``phi`` to ``psi = E(f / phi | cols)`` and then to
    ``phi' = E(f / psi | rows)``; after each step ``f / (phi psi)`` has
    unit column averages.
    """
    v, mu, nu = f.values, f.mu, f.nu
    phi = np.ones(len(mu)) if phi0 is None else np.array(phi0, dtype=np.float64)
    while True:
        psi = mu @ (v / phi[:, None])
        yield phi, psi
        phi = (v / psi[None, :]) @ nu


def _ds_residual(g, mu, nu):
    return float(max(np.abs(g @ nu - 1.0).max(), np.abs(mu @ g - 1.0).max()))


def _gauge(f, phi, psi, iterations, residual, kappa):
    t = geometric_mean(psi, f.nu)
    phi = phi * t
    psi = psi / t
    g = f.values / (phi[:, None] * psi[None, :])
    return FunctionalSinkhorn(phi, psi, GridFunction(g, f.mu, f.nu), iterations, residual, kappa)


def functional_sinkhorn(f, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, phi0=None):
    """Sinkhorn decomposition ``f = phi * g * psi`` with ``g`` doubly stochastic.

    ``g`` is defined as ``f / (phi psi)``, so the factorization is exact;
    the loop stops when both weighted marginals of ``g`` are within ``tol``
    of 1.  Gauge: ``geometric_mean(psi, nu) == 1``.
    """
    if not np.all(f.values > 0):
        raise NonPositiveEntry("functional Sinkhorn needs a strictly positive function")
    kappa = functional_contraction_factor(f)
    iterations = 0
    for phi, psi in ray_iterates(f, phi0):
        g = f.values / (phi[:, None] * psi[None, :])
        residual = _ds_residual(g, f.mu, f.nu)
        if residual < tol:
            return _gauge(f, phi, psi, iterations, residual, kappa)
        iterations += 1
        if iterations > max_iter:
            partial = _gauge(f, phi, psi, iterations, residual, kappa)
            raise MaxIterExceeded(
                f"residual {residual:.3e} >= tol {tol:.1e} after {max_iter} cycles", partial
            )


def certified_budget(f, tol=DEFAULT_TOL, phi0=None):
    """Cycle count after which the contraction guarantees residual < tol.

    Row averages of ``g`` are ``(T phi) / phi`` with weighted mean 1, so the
    residual is at most ``exp(d(phi, T phi)) - 1``, and ``d(phi_k, T phi_k)``
    shrinks by ``kappa`` per cycle.
    """
    kappa = functional_contraction_factor(f)
    it = ray_iterates(f, phi0)
    phi_a, _ = next(it)
    phi_b, _ = next(it)
    a = np.log(phi_b) - np.log(phi_a)
    d0 = float(a.max() - a.min())
    target = math.log1p(tol)
    if d0 <= target:
        return 1
    if kappa == 0.0:
        return 2
    return 1 + math.ceil(math.log(target / d0) / math.log(kappa))


def functional_scaling_mean(f, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER):
    """gm(phi, mu) * gm(psi, nu) from the functional Sinkhorn factors."""
    fac = functional_sinkhorn(f, tol, max_iter)
    return geometric_mean(fac.phi, f.mu) * geometric_mean(fac.psi, f.nu)


def solve_ratio_root(f0, f1, mu, c, rtol=ROOT_RTOL):
    """Unique r > 0 with sum_i mu_i f0_i / (f0_i + r f1_i) = c.

    The left side falls strictly from 1 (r = 0) to 0 (r -> inf), so a
    geometrically grown bracket followed by bisection in log r always
    converges for 0 < c < 1.
    """
    f0 = np.asarray(f0, dtype=np.float64)
    f1 = np.asarray(f1, dtype=np.float64)
    mu = np.asarray(mu, dtype=np.float64)

    def h(r):
        return float(mu @ (f0 / (f0 + r * f1))) - c

    lo = hi = 1.0
    for _ in range(2100):
        if h(lo) > 0:
            break
        lo *= 0.5
    for _ in range(2100):
        if h(hi) < 0:
            break
        hi *= 2.0
    if not (h(lo) > 0 > h(hi)):
        raise BracketFailure(f"could not bracket the root (c={c!r})")
    while hi - lo > rtol * lo:
        mid = math.sqrt(lo * hi)
        if mid <= lo or mid >= hi:
            break
        if h(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def two_block_scaling_mean(f0, f1, mu, c, tol=ROOT_RTOL):
    """Closed-form scaling mean of ``f = f0(x)`` on a y-set of mass ``c``
    and ``f1(x)`` on its complement.  Returns ``(smean, r)``."""
    if not 0.0 < c < 1.0:
        raise ValueError(f"c must lie in (0, 1), got {c!r}")
    f0 = np.asarray(f0, dtype=np.float64)
    f1 = np.asarray(f1, dtype=np.float64)
    mu = _probability_vector(mu, "mu")
    if not (f0.shape == f1.shape == mu.shape):
        raise DimensionError("f0, f1 and mu must have the same length")
    if np.any(np.isnan(f0)) or np.any(np.isnan(f1)):
        raise BracketFailure("NaN input")
    if not (np.all(f0 > 0) and np.all(f1 > 0)):
        raise NonPositiveEntry("f0 and f1 must be positive")
    r = solve_ratio_root(f0, f1, mu, c, tol)
    log_sm = (
        c * math.log(c)
        + (1.0 - c) * math.log((1.0 - c) / r)
        + float(mu @ np.log(f0 + r * f1))
    )
    return math.exp(log_sm), r


def two_block_grid(f0, f1, mu, c):
    """The two-column GridFunction with column weights ``(c, 1 - c)``."""
    values = np.column_stack([np.asarray(f0, float), np.asarray(f1, float)])
    return GridFunction(values, mu, [c, 1.0 - c])


def discretize(f, lam, k, q=8):
    """Cell averages of ``f`` on the uniform ``k x k`` grid of [0, 1]^2.

    ``f(x, y)`` must accept broadcast arrays.  Each cell average uses the
    fixed ``q x q`` midpoint rule; every sample must lie in
    ``[1/lam, lam]``.  Row ``i`` is the x-cell ``[i/k, (i+1)/k)``.
    """
    if k < 1 or q < 1:
        raise ValueError("k and q must be >= 1")
    t = (np.arange(k * q) + 0.5) / (k * q)
    samples = np.asarray(f(t[:, None], t[None, :]), dtype=np.float64)
    samples = np.broadcast_to(samples, (k * q, k * q))
    if not (np.all(samples >= 1.0 / lam) and np.all(samples <= lam)):
        raise BoundsViolated(f"samples outside [{1.0 / lam:g}, {lam:g}]")
    cells = samples.reshape(k, q, k, q).mean(axis=(1, 3))
    return GridFunction.uniform(cells)
