import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from capdisp.sphere import PointSet, Rng, sample_uniform, uniform_directions
from capdisp.vc import (cap_realizes, empirical_shatter, phi_sauer_shelah, shatter_details, traversal_epsilon,
                        traversal_informative, traversal_log_bound, vc_lower_bound_search, vc_traversal_bound)


def test_phi_examples():
    assert phi_sauer_shelah(2, 3) == 7
    assert phi_sauer_shelah(4, 4) == 16
    assert phi_sauer_shelah(3, 10) == 176
    assert phi_sauer_shelah(5, 10**6) == sum(math.comb(10**6, k) for k in range(6))
    with pytest.raises(ValueError):
        phi_sauer_shelah(-1, 3)


@given(st.integers(0, 30), st.integers(1, 30))
def test_phi_properties(d, m):
    if d >= m:
        assert phi_sauer_shelah(d, m) == 2**m
    assert phi_sauer_shelah(d + 1, m) >= phi_sauer_shelah(d, m)
    assert phi_sauer_shelah(d, m + 1) >= phi_sauer_shelah(d, m)


def test_trivial_subsets():
    P = sample_uniform(2, 6, Rng(1))
    r = cap_realizes(P, 0)
    assert r.realized
    assert np.all(P.coords @ r.witness.center.coords < math.cos(r.witness.radius))
    r = cap_realizes(P, (1 << 6) - 1)
    assert r.realized and r.witness.radius == math.pi
    with pytest.raises(ValueError):
        cap_realizes(P, 1 << 6)


def test_small_shatter_counts():
    x = np.array([0.0, 0.0, 1.0])
    assert empirical_shatter(PointSet(x[None])) == 2
    assert empirical_shatter(PointSet(np.vstack([x, -x]))) == 4


def test_non_realizable_subset_has_certificate():
    # four points on a great circle: the alternating subset {0, 2} is not separable
    t = np.arange(4) * math.pi / 2
    P = PointSet(np.column_stack([np.cos(t), np.sin(t), np.zeros(4)]))
    r = cap_realizes(P, [0, 2])
    assert r.realized is False
    assert r.certificate["residual"] <= 1e-9


def _grid_oracle(X, directions):
    # subsets cut out by halfspaces <y,u> >= t, thresholds between sorted projections
    masks = set()
    G = directions @ X.T
    for g in G:
        order = np.argsort(-g)
        gs = g[order]
        for j in range(1, len(g)):
            if gs[j - 1] - gs[j] > 1e-6:
                masks.add(int(sum(1 << int(i) for i in order[:j])))
    return masks


@pytest.mark.parametrize("seed", range(4))
def test_lp_agrees_with_direction_grid(seed):
    P = sample_uniform(2, 6, Rng(seed))
    U = uniform_directions(Rng(seed, 1).generator(), 100_000, 2)
    oracle = _grid_oracle(P.coords, U)
    for T in range(1, (1 << 6) - 1):
        r = cap_realizes(P, T)
        if r.realized is None:
            continue
        if T in oracle:
            assert r.realized, T
        if not r.realized:
            assert T not in oracle, T


@pytest.mark.parametrize("seed", range(6))
def test_shatter_below_sauer_shelah(seed):
    m = 4 + seed
    P = sample_uniform(2, m, Rng(seed))
    res = shatter_details(P)
    assert res.count + res.undecided <= 2**m
    assert res.count <= phi_sauer_shelah(4, m)
    assert len(set(res.realized)) == res.count


def test_shatter_budget():
    with pytest.raises(ValueError):
        empirical_shatter(sample_uniform(2, 23, Rng(0)))


def test_search():
    W = vc_lower_bound_search(2, 4, 1000, Rng(0))
    assert W is not None and shatter_details(W).shattered
    # five points on S^2 are never shattered; a miss is consistent evidence
    assert vc_lower_bound_search(2, 5, 50, Rng(0)) is None


def test_traversal_bound():
    d, m = 4, 40
    assert vc_traversal_bound(m, d, 1e-12) == pytest.approx(2 * (2 * math.e * m / d) ** d, rel=1e-9)
    assert vc_traversal_bound(d, d, 0.3) == pytest.approx(2 * (2 * math.e) ** d * 2 ** (-0.3 * d / 2), rel=1e-12)
    # not clipped
    assert vc_traversal_bound(m, d, 0.1) > 1 and not traversal_informative(m, d, 0.1)
    with pytest.raises(ValueError):
        vc_traversal_bound(3, 4, 0.1)


@given(st.integers(1, 10), st.integers(0, 1000), st.floats(0.01, 5.0), st.floats(0.01, 5.0))
def test_traversal_monotone_in_eps(d, extra, a, b):
    m = d + extra
    lo, hi = min(a, b), max(a, b)
    if hi > lo * (1 + 1e-9):
        # compared in log space: the bound itself underflows for large m * eps
        assert traversal_log_bound(m, d, hi) < traversal_log_bound(m, d, lo)
        assert vc_traversal_bound(m, d, hi) <= vc_traversal_bound(m, d, lo)


def test_traversal_epsilon_grid():
    for d in range(2, 11):
        for m in np.unique(np.geomspace(d + 2, 10**6, 60).astype(int)):
            eps = traversal_epsilon(int(m), d + 2)
            assert vc_traversal_bound(int(m), d + 2, eps) < 1
