"""Dual enumeration, spectral data, and representation matrices."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oscint.dual_spectrum import (
    Su2Spin,
    TorusFreq,
    characters,
    enumerate_dual,
    representation_matrix,
    representation_matrices,
    spectral_data,
)
from oscint.groups import SU2, Su2Point, TorusPoint, compose, su2_matrix, torus
from tests.conftest import random_unit_quaternions


def test_enumerate_torus_examples():
    assert [xi.ell for xi in enumerate_dual(torus(1), 7.0)] == [(-1,), (0,), (1,)]
    # weight of l=1 is sqrt(1+4pi^2) ~ 6.36, of l=2 ~ 12.6
    assert [xi.two_l for xi in enumerate_dual(SU2, 1.0)] == [0]
    assert [xi.two_l for xi in enumerate_dual(SU2, 2.0)] == [0, 1, 2]


@given(st.floats(min_value=1.0, max_value=40.0), st.integers(min_value=1, max_value=2))
@settings(max_examples=40, deadline=None)
def test_enumerate_torus_brute_force(bandwidth, n):
    # independent oracle: scan a box far beyond the bandwidth
    got = set(xi.ell for xi in enumerate_dual(torus(n), bandwidth))
    m = 12
    expected = set()
    for ell in np.ndindex(*([2 * m + 1] * n)):
        vec = tuple(int(v) - m for v in ell)
        lam = 4 * math.pi**2 * sum(v * v for v in vec)
        if math.sqrt(1 + lam) <= bandwidth:
            expected.add(vec)
    assert got == expected


@given(
    st.floats(min_value=1.0, max_value=25.0),
    st.floats(min_value=1.0, max_value=25.0),
)
@settings(max_examples=30, deadline=None)
def test_enumerate_monotone_subset(l1, l2):
    lo, hi = sorted([l1, l2])
    for group in (torus(1), SU2):
        small = enumerate_dual(group, lo)
        big = enumerate_dual(group, hi)
        assert set(small) <= set(big)
        # order is consistent: small appears as a subsequence of big
        it = iter(big)
        assert all(any(b == s for b in it) for s in small)


def test_spectral_data_examples():
    sd = spectral_data(SU2, Su2Spin(1))
    assert sd.dim == 2 and abs(sd.eigenvalue - 0.75) < 1e-15

    sd = spectral_data(torus(2), TorusFreq((0, 0)))
    assert sd.dim == 1 and sd.eigenvalue == 0.0 and sd.weight == 1.0

    sd = spectral_data(SU2, Su2Spin(2))
    assert sd.dim == 3 and abs(sd.weight - math.sqrt(3)) < 1e-12


def test_spectral_data_variant_mismatch():
    with pytest.raises(ValueError):
        spectral_data(SU2, TorusFreq((1,)))
    with pytest.raises(ValueError):
        spectral_data(torus(2), TorusFreq((1,)))  # wrong length


def test_representation_examples():
    m = representation_matrix(torus(1), TorusFreq((3,)), TorusPoint((1 / 6,)))
    assert abs(m[0, 0] - (-1.0)) < 1e-12

    rng = np.random.default_rng(0)
    q = random_unit_quaternions(rng, 1)[0]
    m = representation_matrix(SU2, Su2Spin(0), Su2Point(tuple(q)))
    assert m.shape == (1, 1) and abs(m[0, 0] - 1.0) < 1e-15

    m = representation_matrix(SU2, Su2Spin(1), Su2Point((1.0, 0.0, 0.0, 0.0)))
    assert np.max(np.abs(m - np.eye(2))) < 1e-14


def test_spin_half_is_defining_representation(rng):
    for q in random_unit_quaternions(rng, 10):
        p = Su2Point(tuple(q))
        D = representation_matrix(SU2, Su2Spin(1), p)
        assert np.max(np.abs(D - su2_matrix(p))) < 1e-12


def test_unitarity_thousand_random(rng):
    # all indices with weight <= 16 on both groups
    torus_count, su2_count = 0, 0
    for xi in enumerate_dual(torus(1), 16.0):
        pts = rng.uniform(size=(40, 1))
        mats = representation_matrices(torus(1), xi, pts)
        assert np.max(np.abs(np.abs(mats) - 1.0)) < 1e-12
        torus_count += 40
    for xi in enumerate_dual(SU2, 16.0):
        pts = random_unit_quaternions(rng, 30)
        mats = representation_matrices(SU2, xi, pts)
        eye = np.eye(xi.two_l + 1)
        gram = np.einsum("xab,xcb->xac", mats, np.conj(mats))
        hs = np.sqrt(np.sum(np.abs(gram - eye) ** 2, axis=(1, 2)))
        assert np.max(hs) < 1e-10
        su2_count += 30
    assert torus_count + su2_count >= 1000


def test_homomorphism_random_pairs(rng):
    for xi in enumerate_dual(SU2, 10.0):
        qs = random_unit_quaternions(rng, 6)
        for i in range(0, 6, 2):
            x, y = Su2Point(tuple(qs[i])), Su2Point(tuple(qs[i + 1]))
            Dx = representation_matrix(SU2, xi, x)
            Dy = representation_matrix(SU2, xi, y)
            Dxy = representation_matrix(SU2, xi, compose(x, y))
            hs = np.sqrt(np.sum(np.abs(Dxy - Dx @ Dy) ** 2))
            assert hs < 1e-9


def test_schur_orthogonality_on_grid(su2_grid):
    # B=6 grid integrates pairwise products exactly for 2l <= 5
    for tl1 in range(5):
        for tl2 in range(5):
            t1 = su2_grid.representation_table(Su2Spin(tl1))
            t2 = su2_grid.representation_table(Su2Spin(tl2))
            m = np.einsum("x,xij,xkl->ijkl", su2_grid.weights, t1, np.conj(t2))
            if tl1 != tl2:
                assert np.max(np.abs(m)) < 1e-8
            else:
                d = tl1 + 1
                expect = np.einsum("ik,jl->ijkl", np.eye(d), np.eye(d)) / d
                assert np.max(np.abs(m - expect)) < 1e-8


def test_characters_match_matrix_traces(su2_grid, rng):
    pts = random_unit_quaternions(rng, 50)
    for two_l in [0, 1, 2, 5]:
        chi = characters(SU2, Su2Spin(two_l), pts)
        mats = representation_matrices(SU2, Su2Spin(two_l), pts)
        assert np.max(np.abs(chi - np.trace(mats, axis1=1, axis2=2))) < 1e-10
