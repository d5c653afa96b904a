import math
from itertools import combinations
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import rel
from permascale.errors import AllZeroAlpha, DimensionError, NegativeEntry, ZeroMeanExponent
from permascale.funcspace import geometric_mean, two_block_scaling_mean
from permascale.means import (
    elementary_symmetric,
    hs_limit,
    log_symmetric_means,
    muirhead_limit,
    muirhead_matrix,
    muirhead_mean,
    rep_matrix,
    symmetric_mean,
)
from permascale.permanent import permanent_naive, permanental_mean


def _values(z):
    c = elementary_symmetric(z)
    return c.mantissas * math.exp(c.exponent_log)


def test_elementary_symmetric_examples():
    np.testing.assert_allclose(_values([1, 2, 3]), [1, 6, 11, 6], rtol=1e-15)
    np.testing.assert_allclose(_values([5]), [1, 5], rtol=1e-15)
    np.testing.assert_allclose(_values(np.ones(12)), [comb(12, k) for k in range(13)], rtol=1e-14)


def test_elementary_symmetric_by_enumeration(rng):
    z = rng.random(9) * 3
    for k in range(10):
        exact = math.fsum(math.prod(c) for c in combinations(z, k))
        assert rel(elementary_symmetric(z).value(k), exact) < 1e-13


def test_elementary_symmetric_with_zeros():
    c = elementary_symmetric([0.0, 2.0, 0.0])
    assert c.value(1) == 2.0
    assert c.log_values[2] == -np.inf and c.value(3) == 0.0


def test_no_underflow_for_long_vectors():
    z = np.full(10_000, 1e-3)
    k = 3000
    assert rel(symmetric_mean(z, k), 1e-3) < 1e-10


def test_symmetric_mean_examples(rng):
    z = rng.random(7) + 0.1
    assert rel(symmetric_mean(z, 1), z.mean()) < 1e-14
    assert rel(symmetric_mean(z, 7), math.exp(np.log(z).mean())) < 1e-13
    assert abs(symmetric_mean([1, 2, 3], 2) - math.sqrt(11 / 3)) < 1e-14
    with pytest.raises(IndexError):
        symmetric_mean([1, 2], 3)


def test_rep_matrix_examples():
    np.testing.assert_array_equal(rep_matrix([1, 2], 1), [[1, 2], [1, 1]])
    np.testing.assert_array_equal(rep_matrix([1, 2, 3], 3), np.tile([1, 2, 3], (3, 1)))
    R = rep_matrix([1, 2, 3], 2)
    assert abs(permanental_mean(R) ** 1.5 - math.sqrt(11 / 3)) < 1e-14
    lp = permanent_naive(R).log_value
    assert abs(math.exp((lp - math.lgamma(4)) / 2) - math.sqrt(11 / 3)) < 1e-14


def test_permanent_bridge(rng):
    for n in range(1, 11):
        z = rng.random(n) * 4 + 0.05
        for k in range(1, n + 1):
            assert rel(permanental_mean(rep_matrix(z, k)) ** (n / k), symmetric_mean(z, k)) < 1e-10


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(1e-3, 1e3), min_size=1, max_size=200))
def test_maclaurin_chain(z):
    logs = log_symmetric_means(z)
    assert np.all(np.diff(logs) <= 1e-12)


def test_muirhead_examples(rng):
    z = rng.random(6) + 0.1
    e1 = np.eye(6)[0]
    assert rel(muirhead_mean(z, e1), z.mean()) < 1e-13
    assert rel(muirhead_mean(z, np.ones(6)), math.exp(np.log(z).mean())) < 1e-13
    assert abs(muirhead_mean([1, 2], [2, 1]) - 3 ** (1 / 3)) < 1e-15
    np.testing.assert_array_equal(muirhead_matrix([2, 3], [1, 2]), [[2, 3], [4, 9]])


def test_muirhead_with_binary_exponents(rng):
    for n in range(1, 11):
        z = rng.random(n) * 3 + 0.1
        for k in range(1, n + 1):
            alpha = np.r_[np.ones(k), np.zeros(n - k)]
            assert rel(muirhead_mean(z, alpha), symmetric_mean(z, k)) < 1e-12


def test_muirhead_errors():
    with pytest.raises(AllZeroAlpha):
        muirhead_mean([1, 2], [0, 0])
    with pytest.raises(DimensionError):
        muirhead_mean([1, 2], [1])
    with pytest.raises(NegativeEntry):
        muirhead_mean([1, -2], [1, 1])
    with pytest.raises(NegativeEntry):
        elementary_symmetric([1, -2])


def test_hs_limit_examples():
    lim, r = hs_limit([3.0, 3.0], [0.5, 0.5], 0.4)
    assert rel(lim, 3.0) < 1e-12 and rel(r, 3.0 * 0.6 / 0.4) < 1e-12
    lim, r = hs_limit([1.0, 2.0], [0.5, 0.5], 0.5)
    assert abs(r - math.sqrt(2)) < 1e-12
    assert abs(lim - (4 + 3 * math.sqrt(2)) / (4 * math.sqrt(2))) < 1e-12


def test_hs_limit_is_power_of_two_block(rng):
    for _ in range(30):
        k = int(rng.integers(1, 10))
        g = rng.random(k) * 4 + 0.1
        w = rng.random(k) + 0.1
        w /= w.sum()
        c = rng.uniform(0.05, 0.95)
        sm, _ = two_block_scaling_mean(g, np.ones(k), w, c)
        assert rel(hs_limit(g, w, c)[0], sm ** (1 / c)) < 1e-12


def test_muirhead_limit_special_cases(rng):
    g = rng.random(6) + 0.2
    mu = np.full(6, 1 / 6)
    assert rel(muirhead_limit(g, mu, np.ones(3), np.full(3, 1 / 3)), geometric_mean(g, mu)) < 1e-12
    assert rel(muirhead_limit(np.full(4, 2.5), np.full(4, 0.25), [1.0, 3.0], [0.5, 0.5]), 2.5) < 1e-12
    c = 0.3
    lim = muirhead_limit(g, mu, [1.0, 0.0], [c, 1 - c])
    assert rel(lim, hs_limit(g, mu, c)[0]) < 1e-10
    with pytest.raises(ZeroMeanExponent):
        muirhead_limit(g, mu, [0.0, 0.0], [0.5, 0.5])


def test_muirhead_limit_uses_column_weights():
    g = np.array([1.0, 4.0])
    mu = np.array([0.5, 0.5])
    a = muirhead_limit(g, mu, [1.0, 0.0], [0.5, 0.5])
    b = muirhead_limit(g, mu, [1.0, 0.0], [0.2, 0.8])
    assert a < b  # smaller c sits higher in the MacLaurin chain
    assert rel(b, hs_limit(g, mu, 0.2)[0]) < 1e-10
