import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from capdisp.io import load_pointset, save_pointset
from capdisp.sphere import (Cap, Lens, PointSet, Rng, UnitVector, apply_rotation, geodesic_distance,
                            pairwise_distances, random_rotation, sample_uniform)
from capdisp.volume import cap_volume

dims = st.integers(min_value=1, max_value=8)
seeds = st.integers(min_value=0, max_value=2**32)


def triple(d, seed):
    return sample_uniform(d, 3, Rng(seed)).coords


def test_distance_examples():
    e1, e2 = np.array([1.0, 0, 0]), np.array([0, 1.0, 0])
    assert geodesic_distance(e1, e1) == 0.0
    assert geodesic_distance(e1, -e1) == pytest.approx(math.pi, abs=1e-15)
    assert geodesic_distance(e1, e2) == pytest.approx(math.pi / 2, abs=1e-15)
    with pytest.raises(ValueError):
        geodesic_distance(e1, np.array([1.0, 0]))


@given(dims, seeds)
def test_distance_symmetric_and_triangle(d, seed):
    x, y, z = triple(d, seed)
    assert geodesic_distance(x, y) == geodesic_distance(y, x)
    assert geodesic_distance(x, z) <= geodesic_distance(x, y) + geodesic_distance(y, z) + 1e-12


@given(dims, seeds)
def test_chord_identity(d, seed):
    x, y, _ = triple(d, seed)
    assert np.linalg.norm(x - y) == pytest.approx(2 * math.sin(geodesic_distance(x, y) / 2), abs=1e-12)


def test_unit_vector_normalizes_and_validates():
    u = UnitVector([3.0, 4.0])
    assert np.linalg.norm(u.coords) == pytest.approx(1.0, abs=1e-15)
    assert u.d == 1
    with pytest.raises(ValueError):
        UnitVector([0.0, 0.0])
    with pytest.raises(ValueError):
        UnitVector([1.0])


def test_pointset_and_cap_validation():
    with pytest.raises(ValueError):
        PointSet(np.zeros((0, 3)))
    with pytest.raises(ValueError):
        Cap(UnitVector([1.0, 0, 0]), 4.0)
    with pytest.raises(ValueError):
        Lens((Cap([1.0, 0, 0], 1.0), Cap([1.0, 0], 1.0)))
    with pytest.raises(ValueError):
        sample_uniform(2, 0, Rng())


def test_sampling_is_deterministic():
    a = sample_uniform(3, 50, Rng(7, 2)).coords
    b = sample_uniform(3, 50, Rng(7, 2)).coords
    c = sample_uniform(3, 50, Rng(7, 3)).coords
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_sample_mean_and_cap_fraction():
    for seed in range(5):
        X = sample_uniform(2, 1000, Rng(seed)).coords
        assert np.linalg.norm(X.mean(axis=0)) <= 0.1
        frac = np.mean(X[:, 0] >= math.cos(math.pi / 3))
        assert abs(frac - cap_volume(2, math.pi / 3)) <= 0.05


def test_uniformity_ks():
    # <x, u> has CDF t -> 1 - V(arccos t)
    d = 3
    X = sample_uniform(d, 100_000, Rng(11)).coords
    t = X[:, 0]
    res = stats.kstest(t, lambda s: 1.0 - cap_volume(d, np.arccos(np.clip(s, -1, 1))))
    assert res.pvalue > 1e-3


def test_rotation():
    P = sample_uniform(4, 30, Rng(1))
    assert np.array_equal(apply_rotation(P, np.eye(5)).coords, P.coords)
    assert np.allclose(apply_rotation(P, -np.eye(5)).coords, -P.coords)
    Q = random_rotation(4, Rng(2))
    R = apply_rotation(P, Q)
    assert np.max(np.abs(pairwise_distances(R) - pairwise_distances(P))) <= 1e-10
    with pytest.raises(ValueError):
        apply_rotation(P, 1.01 * np.eye(5))


@pytest.mark.parametrize("suffix", [".json", ".csv"])
def test_roundtrip_is_lossless(tmp_path, suffix):
    P = sample_uniform(3, 25, Rng(5))
    path = tmp_path / f"p{suffix}"
    save_pointset(P, path)
    assert np.array_equal(load_pointset(path).coords, P.coords)
