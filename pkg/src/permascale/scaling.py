"""Sinkhorn decompositions and the scaling mean of square nonnegative matrices.

A matrix ``A`` in P_n factors as ``A = D S E`` with ``S`` doubly stochastic
and ``D = diag(d)``, ``E = diag(e)`` positive.  The pair ``(d, e)`` is
unique up to ``(t d, e / t)``; we fix the gauge by ``gmean(e) = 1``.
The scaling mean is then ``gmean(d) * gmean(e) / n``.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from . import pattern
from ._matrix import as_nonneg_matrix, gmean
from .errors import DimensionError, MaxIterExceeded, NonPositiveEntry, NotInPn

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 100_000


@dataclass(frozen=True)
class SinkhornFactorization:
    d: np.ndarray
    e: np.ndarray
    s: np.ndarray
    iterations: int
    residual: float
    certificate: float | None = None

    def reconstruct(self):
        return self.d[:, None] * self.s * self.e[None, :]


def contraction_factor(A):
    """Birkhoff factor tanh^2(delta/4) for one full normalization cycle,
    with delta = 2 log(max/min) bounding the image diameter of each
    half-step.  ``None`` unless ``A`` is entrywise positive."""
    M = np.asarray(A, dtype=np.float64)
    lo = M.min()
    if not lo > 0:
        return None
    delta = 2.0 * math.log(M.max() / lo)
    return math.tanh(delta / 4.0) ** 2


def ds_residual(S):
    """Largest deviation of a row or column sum of ``S`` from 1."""
    return float(max(np.abs(S.sum(axis=1) - 1.0).max(), np.abs(S.sum(axis=0) - 1.0).max()))


def sinkhorn_iterates(A, r=None):
    """Yield ``(r, c)`` after every full cycle of alternating normalization.

    ``diag(r) A diag(c)`` has unit column sums after each cycle.  ``r`` is
    the row multiplier, so ``d = 1/r``; Hilbert distances between
    successive ``r`` contract by at least :func:`contraction_factor`.
    """
    M = np.asarray(A, dtype=np.float64)
    r = np.ones(M.shape[0]) if r is None else np.asarray(r, dtype=np.float64)
    while True:
        c = 1.0 / (M.T @ r)
        yield r, c
        r = 1.0 / (M @ c)


def _finish(M, r, c, iterations, residual, kappa):
    d = 1.0 / r
    e = 1.0 / c
    g = gmean(e)
    e = e / g
    d = d * g
    s = r[:, None] * M * c[None, :]
    return SinkhornFactorization(d, e, s, iterations, residual, kappa)


def sinkhorn(A, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, check_pattern=True):
    """Sinkhorn decomposition ``A = D S E`` by alternating normalization.

    Stops once every row and column sum of ``S`` is within ``tol`` of 1.
    Raises :class:`NotInPn` for matrices with no Sinkhorn decomposition
    and :class:`MaxIterExceeded` (carrying the last iterate) when the
    budget runs out.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    M = as_nonneg_matrix(A)
    n = M.shape[0]
    if check_pattern and n > 0:
        report = pattern.decompose_fully_indecomposable(M)
        if not (report.has_positive_diagonal and report.in_Pn):
            raise NotInPn("matrix has positive entries off every positive diagonal")
    kappa = contraction_factor(M)

    ones = np.ones(n)
    residual = ds_residual(M)
    if residual < tol:
        return _finish(M, ones, ones, 0, residual, kappa)

    iterations = 0
    for r, c in sinkhorn_iterates(M):
        iterations += 1
        S = r[:, None] * M * c[None, :]
        residual = ds_residual(S)
        if residual < tol:
            return _finish(M, r, c, iterations, residual, kappa)
        if iterations >= max_iter:
            partial = _finish(M, r, c, iterations, residual, kappa)
            raise MaxIterExceeded(
                f"residual {residual:.3e} >= tol {tol:.1e} after {max_iter} cycles", partial
            )


def log_scaling_mean(A, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER):
    M = as_nonneg_matrix(A)
    n = M.shape[0]
    report = pattern.decompose_fully_indecomposable(M)
    if not report.has_positive_diagonal:
        return -math.inf
    log_d = 0.0
    log_e = 0.0
    for rows, cols in report.blocks:
        fac = sinkhorn(M[np.ix_(rows, cols)], tol, max_iter, check_pattern=False)
        log_d += np.log(fac.d).sum()
        log_e += np.log(fac.e).sum()
    return float((log_d + log_e) / n - math.log(n))


def scaling_mean(A, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER):
    """Scaling mean of a square nonnegative matrix.

    Works on Pi(A): each fully indecomposable block is Sinkhorn-scaled on
    its own and the block scalings are assembled into ``(d, e)``.
    Returns 0 when the permanent vanishes.
    """
    return math.exp(log_scaling_mean(A, tol, max_iter))


def scaling_mean_2x2(a, b, c, d):
    """Closed form (sqrt(ad) + sqrt(bc)) / 2 for [[a, b], [c, d]]."""
    return (math.sqrt(a * d) + math.sqrt(b * c)) / 2.0


def hilbert_distance(u, v):
    """Hilbert projective distance log(max(v/u) / min(v/u))."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DimensionError(f"shape mismatch {u.shape} vs {v.shape}")
    if not (np.all(u > 0) and np.all(v > 0)):
        raise NonPositiveEntry("Hilbert distance needs strictly positive vectors")
    q = np.log(v) - np.log(u)
    return float(q.max() - q.min())


def kron(A, B):
    return np.kron(as_nonneg_matrix(A, square=False), as_nonneg_matrix(B, square=False))


def _perron_irreducible(B, tol, max_iter):
    # B = A + I is primitive for irreducible A, so the Collatz-Wielandt
    # bracket closes geometrically.
    x = np.ones(B.shape[0])
    lo = hi = 0.0
    for _ in range(max_iter):
        y = B @ x
        q = y / x
        lo, hi = q.min(), q.max()
        if hi - lo <= tol * hi:
            return 0.5 * (lo + hi) - 1.0
        x = y / y.max()
    raise MaxIterExceeded(f"power iteration bracket [{lo}, {hi}] did not close", 0.5 * (lo + hi) - 1.0)


def spectral_radius(A, tol=1e-12, max_iter=DEFAULT_MAX_ITER):
    """Perron root of a nonnegative matrix by power iteration on ``A + I``.

    The spectrum is the union of the spectra of the irreducible diagonal
    blocks (strong components of the digraph of ``A``), so each block is
    iterated on its own.  The Collatz–Wielandt quotients ``(Bx)_i / x_i``
    of the positive iterate bracket ``rho(B)``; iteration stops when the
    bracket is narrower than ``tol`` relative.  The shift makes periodic
    patterns converge.
    """
    M = as_nonneg_matrix(A)
    n = M.shape[0]
    if n == 0:
        return 0.0
    _, labels = connected_components(csr_matrix(M != 0.0), directed=True, connection="strong")
    rho = 0.0
    for label in range(labels.max() + 1):
        idx = np.flatnonzero(labels == label)
        if idx.size == 1:
            rho = max(rho, float(M[idx[0], idx[0]]))
            continue
        B = M[np.ix_(idx, idx)] + np.eye(idx.size)
        rho = max(rho, _perron_irreducible(B, tol, max_iter))
    return rho


def spectral_radius_cross_check(A, tol=1e-12):
    """Return ``(smean(A), rho(Delta A) / (n gmean(Delta)))`` at the
    optimal ``Delta = E^-1 D^-1`` taken from the Sinkhorn factorization."""
    M = as_nonneg_matrix(A)
    n = M.shape[0]
    fac = sinkhorn(M, tol=tol)
    delta = 1.0 / (fac.d * fac.e)
    rho = spectral_radius(delta[:, None] * M, tol=tol)
    return scaling_mean(M, tol=tol), rho / (n * gmean(delta))
