"""Reproducible experiment harnesses behind the CLI.

Randomness comes from Philox (a counter-based generator) keyed by the
64-bit seed plus a stream index, so every trial owns an independent
stream and results do not depend on evaluation order.
"""
import math
import time
from dataclasses import dataclass

import numpy as np

from . import catalog, funcspace, means
from .dynamics import DEFAULT_ALPHA_S, IntervalMap, dynamical_matrix, orbit
from .errors import CapExceeded
from .permanent import DEFAULT_CAP, permanental_mean
from .scaling import DEFAULT_TOL, kron, scaling_mean, sinkhorn

VDW_SLACK = -1e-10
HS_GRID = 1 << 14


@dataclass(frozen=True)
class ExperimentRecord:
    n: int
    value_a: float
    value_b: float
    abs_err: float
    rel_err: float
    wall_ms: float

    @classmethod
    def compare(cls, n, value_a, value_b, wall_ms=0.0):
        abs_err = abs(value_a - value_b)
        return cls(n, value_a, value_b, abs_err, abs_err / max(abs(value_b), 1e-300), wall_ms)


def make_rng(seed, *stream):
    ss = np.random.SeedSequence(
        int(seed) & 0xFFFF_FFFF_FFFF_FFFF, spawn_key=tuple(int(s) for s in stream)
    )
    return np.random.Generator(np.random.Philox(ss))


def _timed(fn, *args, **kwargs):
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, (time.perf_counter() - t0) * 1e3


def friedland(A, m_max, cap=DEFAULT_CAP, tol=DEFAULT_TOL):
    """pmean(A kron U_m) for m = 1..m_max against smean(A)."""
    A = np.asarray(A, dtype=np.float64)
    n = A.shape[0]
    if n * m_max > cap:
        raise CapExceeded(f"n*m_max = {n * m_max} exceeds cap {cap}")
    target = scaling_mean(A, tol=tol)
    records = []
    for m in range(1, m_max + 1):
        value, ms = _timed(permanental_mean, kron(A, np.ones((m, m))), cap=cap)
        records.append(ExperimentRecord.compare(m, value, target, ms))
    return records


def grid_scaling_mean(fn, k_grid, tol=DEFAULT_TOL):
    return funcspace.functional_scaling_mean(funcspace.discretize(fn.f, fn.lam, k_grid), tol)


@dataclass(frozen=True)
class LLPResult:
    x0: float
    y0: float
    smean: float
    smean_refined: float
    records: list


def llp(
    f_spec,
    n_list,
    T=None,
    S=None,
    x0=None,
    y0=None,
    k_grid=64,
    seed=0,
    cap=DEFAULT_CAP,
    tol=DEFAULT_TOL,
):
    """pmean of the dynamical matrices of ``f`` against smean(f).

    smean(f) is computed on the ``k_grid`` discretization and again on
    ``2 k_grid`` as a refinement check.  ``x0``/``y0`` left as ``None``
    are drawn from the seeded stream.
    """
    fn = catalog.function2d(f_spec)
    T = T or IntervalMap.rotation()
    S = S or IntervalMap.rotation(DEFAULT_ALPHA_S)
    if max(n_list) > cap:
        raise CapExceeded(f"n={max(n_list)} exceeds cap {cap}")
    rng = make_rng(seed)
    x0 = float(rng.random()) if x0 is None else float(x0)
    y0 = float(rng.random()) if y0 is None else float(y0)
    target = grid_scaling_mean(fn, k_grid, tol)
    refined = grid_scaling_mean(fn, 2 * k_grid, tol)
    records = []
    for n in n_list:
        D = dynamical_matrix(fn.f, T, S, x0, y0, n)
        value, ms = _timed(permanental_mean, D, cap=cap)
        records.append(ExperimentRecord.compare(n, value, target, ms))
    return LLPResult(x0, y0, target, refined, records)


def hs(g_spec, c, n, seed=0, x0=None, T=None, grid=HS_GRID):
    """Empirical sym_round(cn) along a rotation orbit vs the ergodic limit."""
    fn = catalog.function1d(g_spec)
    T = T or IntervalMap.rotation()
    x0 = float(make_rng(seed).random()) if x0 is None else float(x0)
    k = min(max(round(c * n), 1), n)
    t0 = time.perf_counter()
    z = fn.f(orbit(T, x0, n))
    empirical = means.symmetric_mean(z, k)
    xs = (np.arange(grid) + 0.5) / grid
    formula, _ = means.hs_limit(fn.f(xs), np.full(grid, 1.0 / grid), c)
    ms = (time.perf_counter() - t0) * 1e3
    return ExperimentRecord.compare(n, empirical, formula, ms)


def _random_nonneg(rng, n):
    density = rng.choice([1.0, 0.8, 0.6, 0.4])
    return rng.random((n, n)) * (rng.random((n, n)) < density)


def _vdw_trial(rng, n, tol):
    A = _random_nonneg(rng, n)
    sm = scaling_mean(A, tol=tol)
    pm = permanental_mean(A)
    upper = n * math.exp(-math.lgamma(n + 1) / n) * sm
    return {"smean": sm, "pmean": pm, "slack_lower": pm - sm, "slack_upper": upper - pm}


def _brualdi_trial(rng, n, tol):
    A = rng.random((n, n)) + 0.01
    B = rng.random((n, n)) + 0.01
    lhs = permanental_mean(kron(A, B))
    rhs = permanental_mean(A) * permanental_mean(B)
    return {"pmean_kron": lhs, "pmean_product": rhs, "slack": rhs - lhs}


def _conj2_trial(rng, n, tol, lam=2.0):
    A = np.exp(rng.uniform(-math.log(lam), math.log(lam), (n, n)))
    S = sinkhorn(A, tol=tol, check_pattern=False).s
    B = n * S
    pm = permanental_mean(B)
    return {
        "pmean": pm,
        "abs_dev": abs(pm - 1.0),
        "lam_after": float(max(B.max(), 1.0 / B.min())),
    }


def fuzz(target, trials, n, seed=0, tol=DEFAULT_TOL, cap=DEFAULT_CAP):
    """Randomized checks of the vdW bounds (asserted) and two conjectures
    (reported only).

    Returns ``(summary, rows)``.  For ``conj2`` the size sweeps 4..n.
    """
    rows = []
    if target == "vdw":
        if n > cap:
            raise CapExceeded(f"n={n} exceeds cap {cap}")
        for t in range(trials):
            rows.append({"trial": t, "n": n, **_vdw_trial(make_rng(seed, t), n, tol)})
        lower = [r["slack_lower"] for r in rows]
        upper = [r["slack_upper"] for r in rows]
        violations = [
            r["trial"] for r in rows if min(r["slack_lower"], r["slack_upper"]) < VDW_SLACK
        ]
        summary = {
            "target": target,
            "trials": trials,
            "n": n,
            "seed": seed,
            "min_slack_lower": min(lower, default=None),
            "min_slack_upper": min(upper, default=None),
            "max_slack_lower": max(lower, default=None),
            "max_slack_upper": max(upper, default=None),
            "violations": violations,
        }
    elif target == "brualdi":
        if n * n > cap:
            raise CapExceeded(f"n^2={n * n} exceeds cap {cap}")
        for t in range(trials):
            rows.append({"trial": t, "n": n, **_brualdi_trial(make_rng(seed, t), n, tol)})
        slacks = [r["slack"] for r in rows]
        summary = {
            "target": target,
            "trials": trials,
            "n": n,
            "seed": seed,
            "min_slack": min(slacks, default=None),
            "max_slack": max(slacks, default=None),
            "negative_slack_trials": [r["trial"] for r in rows if r["slack"] < 0],
        }
    elif target == "conj2":
        if n > cap:
            raise CapExceeded(f"n={n} exceeds cap {cap}")
        by_n = []
        for size in range(4, n + 1):
            devs = []
            for t in range(trials):
                row = {"trial": t, "n": size, **_conj2_trial(make_rng(seed, size, t), size, tol)}
                rows.append(row)
                devs.append(row["abs_dev"])
            by_n.append(
                {"n": size, "mean_abs_dev": float(np.mean(devs)), "max_abs_dev": float(np.max(devs))}
            )
        summary = {"target": target, "trials": trials, "n": n, "seed": seed, "by_n": by_n}
    else:
        raise ValueError(f"unknown fuzz target {target!r}")
    return summary, rows
