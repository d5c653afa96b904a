import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import i0

from conftest import rel
from permascale import catalog
from permascale.errors import (
    BoundsViolated,
    BracketFailure,
    DimensionError,
    MaxIterExceeded,
    NonPositiveEntry,
)
from permascale.funcspace import (
    GridFunction,
    certified_budget,
    conditional_expectation,
    discretize,
    functional_contraction_factor,
    functional_scaling_mean,
    functional_sinkhorn,
    geometric_mean,
    ray_iterates,
    solve_ratio_root,
    two_block_grid,
    two_block_scaling_mean,
)
from permascale.scaling import hilbert_distance, scaling_mean


def _random_grid(gen, shape, lam=10.0):
    values = np.exp(gen.uniform(-math.log(lam), math.log(lam), shape))
    mu = gen.random(shape[0]) + 0.1
    nu = gen.random(shape[1]) + 0.1
    return GridFunction(values, mu / mu.sum(), nu / nu.sum())


def test_grid_function_validation():
    with pytest.raises(ValueError):
        GridFunction(np.ones((2, 2)), [0.5, 0.6], [0.5, 0.5])
    with pytest.raises(ValueError):
        GridFunction(np.ones((2, 2)), [1.0, 0.0], [0.5, 0.5])
    with pytest.raises(DimensionError):
        GridFunction(np.ones((2, 3)), [0.5, 0.5], [0.5, 0.5])


def test_grid_function_json_roundtrip(rng):
    f = _random_grid(rng, (3, 4))
    g = GridFunction.from_json(f.to_json())
    np.testing.assert_array_equal(g.values, f.values)
    np.testing.assert_array_equal(g.mu, f.mu)
    with pytest.raises(ValueError):
        GridFunction.from_json(json.dumps({"values": [[1.0]], "mu": [1.0]}))


@pytest.mark.parametrize(
    "v, w, expected",
    [((3, 3, 3), (0.2, 0.3, 0.5), 3.0), ((1, 4), (0.5, 0.5), 2.0), ((1, 8), (2 / 3, 1 / 3), 2.0)],
)
def test_geometric_mean_examples(v, w, expected):
    assert math.isclose(geometric_mean(v, w), expected, rel_tol=1e-15)


def test_conditional_expectation_examples(rng):
    f = GridFunction.uniform(np.full((3, 4), 2.5))
    np.testing.assert_allclose(conditional_expectation(f, "rows"), 2.5)
    np.testing.assert_allclose(conditional_expectation(f, "cols"), 2.5)
    g = GridFunction.uniform(np.array([[0.5, 1.5], [1.5, 0.5]]))
    np.testing.assert_allclose(conditional_expectation(g, "rows"), 1.0)
    u = rng.random(3) + 0.1
    v = rng.random(4) + 0.1
    nu = np.full(4, 0.25)
    v = v / (nu @ v)
    h = GridFunction(np.outer(u, v), np.full(3, 1 / 3), nu)
    np.testing.assert_allclose(conditional_expectation(h, "rows"), u, rtol=1e-14)
    with pytest.raises(ValueError):
        conditional_expectation(h, "diag")


def test_doubly_stochastic_is_fixed_point():
    f = GridFunction.uniform(np.array([[0.5, 1.5], [1.5, 0.5]]))
    fac = functional_sinkhorn(f)
    assert fac.iterations == 0
    np.testing.assert_array_equal(fac.phi, 1.0)
    np.testing.assert_array_equal(fac.psi, 1.0)
    np.testing.assert_array_equal(fac.g.values, f.values)
    assert functional_scaling_mean(f) == 1.0


def test_separable_function_has_constant_core(rng):
    u = rng.random(5) + 0.1
    v = rng.random(6) + 0.1
    f = GridFunction.uniform(np.outer(u, v))
    fac = functional_sinkhorn(f)
    np.testing.assert_allclose(fac.g.values, 1.0, atol=1e-12)
    np.testing.assert_allclose(fac.phi / u, (fac.phi / u)[0], rtol=1e-12)
    np.testing.assert_allclose(fac.psi / v, (fac.psi / v)[0], rtol=1e-12)


def test_constant_and_matrix_bridge(rng):
    assert math.isclose(functional_scaling_mean(GridFunction.uniform(np.full((3, 5), 4.0))), 4.0)
    A = rng.random((5, 5)) + 0.1
    n = 5
    assert rel(functional_scaling_mean(GridFunction.uniform(n * A)), n * scaling_mean(A)) < 1e-10
    S = np.array([[0.7, 0.3], [0.3, 0.7]])
    assert abs(functional_scaling_mean(GridFunction.uniform(2 * S)) - 1.0) < 1e-15


@pytest.mark.parametrize("gamma, c", [(4.0, 0.5), (3.0, 0.3), (0.5, 0.8)])
def test_two_block_constant_rows(gamma, c):
    sm, r = two_block_scaling_mean([gamma], [1.0], [1.0], c)
    assert rel(r, gamma * (1 - c) / c) < 1e-12
    assert rel(sm, gamma**c) < 1e-12


def _bisect_root_from_scratch(h, lo, hi):
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if h(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_two_block_worked_example():
    c = 0.5
    r_ref = _bisect_root_from_scratch(lambda r: 0.5 / (1 + r) + 1 / (2 + r) - c, 0.0, 10.0)
    assert abs(r_ref - math.sqrt(2)) < 1e-14
    sm, r = two_block_scaling_mean([1.0, 2.0], [1.0, 1.0], [0.5, 0.5], c)
    assert abs(r - r_ref) < 1e-12
    expected = math.sqrt(c * (1 - c) / r_ref) * math.sqrt((1 + r_ref) * (2 + r_ref))
    assert abs(sm - expected) < 1e-12
    assert abs(sm - 1.2071068) < 1e-7


def test_two_block_matches_iterative_factors(rng):
    for _ in range(20):
        k = int(rng.integers(1, 8))
        f0 = rng.random(k) * 3 + 0.2
        f1 = rng.random(k) * 3 + 0.2
        mu = rng.random(k) + 0.1
        mu /= mu.sum()
        c = rng.uniform(0.05, 0.95)
        sm, r = two_block_scaling_mean(f0, f1, mu, c)
        grid = two_block_grid(f0, f1, mu, c)
        assert abs(sm - functional_scaling_mean(grid)) < 1e-10
        fac = functional_sinkhorn(grid)
        phi_ref = f0 + r * f1
        np.testing.assert_allclose(fac.phi / phi_ref, (fac.phi / phi_ref)[0], rtol=1e-9)
        psi_ref = np.array([c, (1 - c) / r])
        np.testing.assert_allclose(fac.psi / psi_ref, (fac.psi / psi_ref)[0], rtol=1e-9)


def test_two_block_errors():
    with pytest.raises(ValueError):
        two_block_scaling_mean([1.0], [1.0], [1.0], 1.0)
    with pytest.raises(NonPositiveEntry):
        two_block_scaling_mean([0.0], [1.0], [1.0], 0.5)
    with pytest.raises(BracketFailure):
        two_block_scaling_mean([np.nan], [1.0], [1.0], 0.5)
    with pytest.raises(BracketFailure):
        solve_ratio_root([1.0], [1.0], [1.0], 1.5)


def test_functional_sinkhorn_errors():
    f = GridFunction.uniform(np.array([[1.0, 0.0], [1.0, 1.0]]))
    with pytest.raises(NonPositiveEntry):
        functional_sinkhorn(f)
    g = GridFunction.uniform(np.array([[1.0, 50.0], [1.0, 1.0]]))
    with pytest.raises(MaxIterExceeded) as info:
        functional_sinkhorn(g, max_iter=1)
    assert info.value.partial is not None


def test_random_grids_converge_within_budget(rng):
    for _ in range(20):
        f = _random_grid(rng, (int(rng.integers(2, 12)), int(rng.integers(2, 12))))
        fac = functional_sinkhorn(f)
        assert fac.residual <= 1e-12
        assert fac.iterations <= certified_budget(f)
        np.testing.assert_allclose(fac.reconstruct(), f.values, rtol=1e-14)
        assert abs(geometric_mean(fac.psi, f.nu) - 1.0) < 1e-14


def test_core_is_gauge_invariant(rng):
    for _ in range(20):
        f = _random_grid(rng, (6, 7))
        g0 = functional_sinkhorn(f).g.values
        phi0 = np.exp(rng.normal(0, 2, 6))
        g1 = functional_sinkhorn(f, phi0=phi0).g.values
        np.testing.assert_allclose(g1, g0, atol=1e-10)


def test_measured_contraction_below_kappa(rng):
    for _ in range(20):
        f = _random_grid(rng, (5, 6), lam=4.0)
        kappa = functional_contraction_factor(f)
        it = ray_iterates(f)
        phis = [next(it)[0].copy() for _ in range(8)]
        dists = [hilbert_distance(a, b) for a, b in zip(phis, phis[1:])]
        for prev, cur in zip(dists, dists[1:]):
            if prev > 1e-12:
                assert cur <= kappa * prev * (1 + 1e-9) + 1e-15


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_homogeneity(m, n, seed):
    gen = np.random.default_rng(seed)
    f = _random_grid(gen, (m, n), lam=5.0)
    phi = np.exp(gen.normal(size=m))
    psi = np.exp(gen.normal(size=n))
    scaled = GridFunction(phi[:, None] * f.values * psi[None, :], f.mu, f.nu)
    expected = geometric_mean(phi, f.mu) * functional_scaling_mean(f) * geometric_mean(psi, f.nu)
    assert rel(functional_scaling_mean(scaled), expected) < 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_monotonicity(m, n, seed):
    gen = np.random.default_rng(seed)
    f = _random_grid(gen, (m, n), lam=5.0)
    bigger = GridFunction(f.values * (1 + gen.random((m, n))), f.mu, f.nu)
    assert functional_scaling_mean(f) <= functional_scaling_mean(bigger) + 1e-10


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.floats(0.01, 100.0), st.floats(0.01, 1.0)), min_size=1, max_size=10))
def test_am_gm(pairs):
    v = np.array([p[0] for p in pairs])
    w = np.array([p[1] for p in pairs])
    w = w / w.sum()
    assert geometric_mean(v, w) <= (w @ v) * (1 + 1e-12)


def test_discretize_examples():
    f = discretize(lambda x, y: np.full(np.broadcast(x, y).shape, 3.0), 3.0, 5)
    np.testing.assert_array_equal(f.values, 3.0)
    step = discretize(lambda x, y: np.where(x < 0.5, 2.0, 1.0) * np.where(y < 0.25, 1.5, 1.0), 3.0, 4)
    expected = np.outer([2, 2, 1, 1], [1.5, 1, 1, 1])
    np.testing.assert_allclose(step.values, expected, rtol=1e-15)
    with pytest.raises(BoundsViolated):
        discretize(lambda x, y: x + y + 0.01, 1.5, 4)


@pytest.mark.parametrize(
    "spec, expected",
    [("smooth", i0(0.5)), ("smooth:0.8", i0(0.8)), ("sep-exp", 1.0), ("const:2.5", 2.5)],
)
def test_catalog_smean_limits(spec, expected):
    fn = catalog.function2d(spec)
    assert abs(functional_scaling_mean(discretize(fn.f, fn.lam, 64)) - expected) < 1e-4


def test_two_block_catalog_matches_closed_form():
    fn = catalog.function2d("two-block")
    k = 64
    grid = discretize(fn.f, fn.lam, k)
    xs = (np.arange(k) + 0.5) / k
    sm, _ = two_block_scaling_mean(1 + xs, np.ones(k), np.full(k, 1 / k), 0.5)
    assert abs(functional_scaling_mean(grid) - sm) < 1e-10


def test_refinement_is_cauchy():
    # The split at y = 0.37 never aligns with the grid, so the limit is
    # approached slowly enough to observe.
    fn = catalog.function2d("two-block:0.37")
    vals = [functional_scaling_mean(discretize(fn.f, fn.lam, k)) for k in (8, 16, 32, 64, 128)]
    diffs = np.abs(np.diff(vals))
    assert np.all(diffs[1:] < diffs[:-1])


@pytest.mark.parametrize("spec", ["nope", "const", "two-block:1.5", "sep-exp:1", "const:-1"])
def test_catalog_rejects_bad_specs(spec):
    with pytest.raises(ValueError):
        catalog.function2d(spec)
