"""Exact permanents and permanental means of nonnegative matrices."""
import math
from functools import lru_cache
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from . import pattern
from ._matrix import as_nonneg_matrix
from ._ryser import ryser
from .errors import CapExceeded, InternalError

DEFAULT_CAP = 26
NAIVE_CAP = 10


@dataclass(frozen=True)
class LogPermanent:
    """Permanent stored as its natural log; ``log_value`` is meaningless
    when ``is_zero``."""

    is_zero: bool
    log_value: float = 0.0

    @property
    def value(self):
        return 0.0 if self.is_zero else math.exp(self.log_value)

    @classmethod
    def zero(cls):
        return cls(True, 0.0)


def _log_ryser(B, parallel):
    c = float(B.max())
    p = ryser(B / c, parallel=parallel)
    if not p > 1e-300:
        raise InternalError(f"Ryser sum {p!r} for a matrix with a positive diagonal")
    return B.shape[0] * math.log(c) + math.log(p)


def permanent(A, cap=DEFAULT_CAP, parallel=False, decompose=True):
    """Permanent of a nonnegative square matrix.

    Zero permanents are detected exactly by bipartite matching.  With
    ``decompose`` the Gray-code Ryser kernel runs on each fully
    indecomposable block of Pi(A) and the logs are summed; this is exact
    since per A = per Pi(A) = product of the block permanents.  Each
    kernel call pre-scales by the block maximum ``c`` and adds back
    ``k log c``.
    """
    M = as_nonneg_matrix(A)
    n = M.shape[0]
    if n > cap:
        raise CapExceeded(f"n={n} exceeds permanent cap {cap}")
    if n == 0:
        return LogPermanent(False, 0.0)
    report = pattern.decompose_fully_indecomposable(M)
    if not report.has_positive_diagonal:
        return LogPermanent.zero()
    if not decompose:
        return LogPermanent(False, _log_ryser(M, parallel))
    total = 0.0
    for rows, cols in report.blocks:
        total += _log_ryser(M[np.ix_(rows, cols)], parallel)
    return LogPermanent(False, total)


@lru_cache(maxsize=None)
def _permutation_table(n):
    table = np.array(list(permutations(range(n))), dtype=np.intp).reshape(-1, n)
    table.flags.writeable = False
    return table


def permanent_naive(A):
    """Permanent by enumerating all n! permutations (oracle, n <= 10)."""
    M = as_nonneg_matrix(A)
    n = M.shape[0]
    if n > NAIVE_CAP:
        raise CapExceeded(f"n={n} exceeds naive cap {NAIVE_CAP}")
    if n == 0:
        return LogPermanent(False, 0.0)
    products = M[np.arange(n), _permutation_table(n)].prod(axis=1)
    total = math.fsum(products)
    if total == 0.0:
        return LogPermanent.zero()
    return LogPermanent(False, math.log(total))


def log_pmean(A, cap=DEFAULT_CAP, parallel=False):
    """log of the permanental mean, or ``-inf`` when the permanent is 0."""
    lp = permanent(A, cap=cap, parallel=parallel)
    n = np.shape(A)[0]
    if lp.is_zero:
        return -math.inf
    return (lp.log_value - math.lgamma(n + 1)) / n


def permanental_mean(A, cap=DEFAULT_CAP, parallel=False):
    """(per A / n!)^(1/n), evaluated in log space."""
    return math.exp(log_pmean(A, cap=cap, parallel=parallel))


def minor(A, i, j):
    """``A(i|j)``: delete row ``i`` and column ``j``."""
    M = np.asarray(A)
    return np.delete(np.delete(M, i, axis=0), j, axis=1)


def laplace_expansion_check(A, i, j):
    """per A(i|j), the partial derivative of per A in the entry a_ij."""
    M = as_nonneg_matrix(A)
    n = M.shape[0]
    if not 2 <= n <= 12:
        raise ValueError(f"laplace_expansion_check needs 2 <= n <= 12, got {n}")
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"index ({i}, {j}) out of range for n={n}")
    return permanent(minor(M, i, j)).value
