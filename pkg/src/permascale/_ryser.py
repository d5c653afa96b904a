"""Gray-code inclusion–exclusion kernel for the permanent.

Implements the centred (Nijenhuis–Wilf) form of Ryser's formula

    per A = (-1)^(n-1) * 2 * sum_{S in [n-1]} (-1)^|S| prod_i (x_i + sum_{j in S} a_ij)

with ``x_i = a_{i,n-1} - sum_j a_ij / 2``.  Subsets are walked in Gray
order so each step touches one column.  The subset range is split into a
fixed number of contiguous chunks that depends only on ``n``; every chunk
rebuilds its row sums from its first subset, so serial and parallel
evaluation perform identical arithmetic.
"""
import math
import os

import numba
import numpy as np
from numba import njit, prange

# The bundled TBB is too old for numba; skip the probe and its warning.
if "NUMBA_THREADING_LAYER" not in os.environ:
    numba.config.THREADING_LAYER = "workqueue"

MAX_CHUNKS = 64
# Row sums are rebuilt from scratch at this stride to bound drift.
_REFRESH_MASK = 1023


@njit(cache=True)
def _rowsums(a, x, gray, r):
    n = a.shape[0]
    for i in range(n):
        acc = x[i]
        for j in range(n - 1):
            if (gray >> j) & 1:
                acc += a[i, j]
        r[i] = acc


@njit(cache=True)
def _popcount_parity(v):
    p = 0
    while v:
        v &= v - 1
        p ^= 1
    return p


@njit(cache=True)
def _chunk(a, x, start, stop):
    n = a.shape[0]
    r = np.empty(n)
    _rowsums(a, x, start ^ (start >> 1), r)
    sign = -1.0 if _popcount_parity(start ^ (start >> 1)) else 1.0
    s = 0.0
    comp = 0.0
    k = start
    while True:
        p = sign
        for i in range(n):
            p *= r[i]
        t = s + p
        if abs(s) >= abs(p):
            comp += (s - t) + p
        else:
            comp += (p - t) + s
        s = t
        k += 1
        if k >= stop:
            break
        gray = k ^ (k >> 1)
        if (k & _REFRESH_MASK) == 0:
            _rowsums(a, x, gray, r)
        else:
            j = 0
            kk = k
            while (kk & 1) == 0:
                kk >>= 1
                j += 1
            if (gray >> j) & 1:
                for i in range(n):
                    r[i] += a[i, j]
            else:
                for i in range(n):
                    r[i] -= a[i, j]
        sign = -sign
    return s, comp


@njit(cache=True)
def _serial(a, x, bounds, out):
    for c in range(bounds.shape[0] - 1):
        out[c, 0], out[c, 1] = _chunk(a, x, bounds[c], bounds[c + 1])


@njit(cache=True, parallel=True)
def _parallel(a, x, bounds, out):
    for c in prange(bounds.shape[0] - 1):
        s, comp = _chunk(a, x, bounds[c], bounds[c + 1])
        out[c, 0] = s
        out[c, 1] = comp


def chunk_bounds(n):
    total = 1 << (n - 1)
    nchunks = min(total, MAX_CHUNKS)
    return np.array([total * c // nchunks for c in range(nchunks + 1)], dtype=np.int64)


def ryser(a, parallel=False):
    """Permanent of a square float64 array with entries in [0, 1]."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    n = a.shape[0]
    if n == 0:
        return 1.0
    x = a[:, n - 1] - 0.5 * a.sum(axis=1)
    bounds = chunk_bounds(n)
    out = np.zeros((len(bounds) - 1, 2))
    (_parallel if parallel else _serial)(a, x, bounds, out)
    total = math.fsum(out.ravel())
    return 2.0 * total if n % 2 == 1 else -2.0 * total
