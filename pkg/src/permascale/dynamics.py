"""Measure-preserving maps of [0, 1) and the matrices they generate.

Rotations are the workhorse for long orbits.  The doubling map loses one
bit per step in floating point, so its orbits are only meaningful for a
few dozen steps.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

DEFAULT_ALPHA_T = math.sqrt(2.0) - 1.0
DEFAULT_ALPHA_S = math.sqrt(3.0) - 1.0
_SPLITTER = 134217729.0  # 2**27 + 1


@dataclass(frozen=True)
class IntervalMap:
    kind: str
    alpha: float | None = None
    k: int | None = None

    def __post_init__(self):
        if self.kind == "rotation":
            if self.alpha is None or not 0.0 < self.alpha < 1.0:
                raise DomainError("rotation needs alpha in (0, 1)")
        elif self.kind == "cyclic":
            if self.k is None or self.k < 1:
                raise DomainError("cyclic map needs k >= 1")
        elif self.kind != "doubling":
            raise DomainError(f"unknown map kind {self.kind!r}")

    @classmethod
    def rotation(cls, alpha=DEFAULT_ALPHA_T):
        return cls("rotation", alpha=float(alpha))

    @classmethod
    def doubling(cls):
        return cls("doubling")

    @classmethod
    def cyclic(cls, k):
        return cls("cyclic", k=int(k))

    @classmethod
    def parse(cls, spec):
        """``rotation[:alpha]``, ``doubling`` or ``cyclic:k``."""
        name, _, arg = spec.partition(":")
        if name == "rotation":
            return cls.rotation(float(arg)) if arg else cls.rotation()
        if name == "doubling" and not arg:
            return cls.doubling()
        if name == "cyclic" and arg:
            return cls.cyclic(int(arg))
        raise DomainError(f"cannot parse map spec {spec!r}")


def frac(v):
    """Fractional part in [0, 1); a rounding result of exactly 1 wraps to 0."""
    v = np.asarray(v, dtype=np.float64)
    out = v - np.floor(v)
    return np.where(out >= 1.0, 0.0, out)


def _two_product(a, b):
    """Error-free product: a*b == p + e exactly (Dekker/Veltkamp)."""
    p = a * b

    def split(x):
        t = _SPLITTER * x
        hi = t - (t - x)
        return hi, x - hi

    ah, al = split(a)
    bh, bl = split(b)
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def _check_point(x):
    if not 0.0 <= x < 1.0:
        raise DomainError(f"point {x!r} outside [0, 1)")


def orbit(T, x0, n):
    """``(x0, T x0, ..., T^(n-1) x0)`` as a float array.

    Rotation points are evaluated in closed form, ``frac(x0 + j * alpha)``,
    with ``j * alpha`` split exactly into a product and its rounding error,
    so the error does not grow with ``j``.
    """
    _check_point(x0)
    if n < 0:
        raise DomainError("orbit length must be nonnegative")
    j = np.arange(n, dtype=np.float64)
    if T.kind == "rotation":
        p, e = _two_product(j, np.float64(T.alpha))
        return frac(frac(p) + (e + x0))
    if T.kind == "cyclic":
        start = round(x0 * T.k)
        if abs(start - x0 * T.k) > 1e-9:
            raise DomainError(f"{x0!r} is not on the 1/{T.k} grid")
        return ((start + np.arange(n)) % T.k) / T.k
    out = np.empty(n)
    x = float(x0)
    for i in range(n):
        out[i] = x
        x = 2.0 * x
        x = x - 1.0 if x >= 1.0 else x
    return out


def dynamical_matrix(f, T, S, x, y, n):
    """n x n matrix with entry (i, j) = f(T^j x, S^i y).

    Columns follow the T-orbit of ``x``, rows the S-orbit of ``y``.
    ``f`` must accept broadcast arrays.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    xs = orbit(T, x, n)
    ys = orbit(S, y, n)
    M = np.asarray(f(xs[None, :], ys[:, None]), dtype=np.float64)
    return np.broadcast_to(M, (n, n)).copy()


def birkhoff_average(T, phi, x, n):
    """(1/n) sum_{i<n} phi(T^i x)."""
    if n < 1:
        raise DomainError("n must be >= 1")
    return float(np.mean(phi(orbit(T, x, n))))
