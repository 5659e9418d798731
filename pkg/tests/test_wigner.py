"""Wigner-d matrices against independent oracles."""

import numpy as np
import pytest
from scipy.linalg import expm
from scipy.special import eval_jacobi

from oscint.wigner import jacobi_poly, wigner_d


@pytest.mark.parametrize("k,a,b", [(0, 0, 0), (1, 2, 1), (4, 0, 3), (7, 1, 1), (12, 3, 0), (20, 2, 5)])
def test_jacobi_matches_scipy(k, a, b):
    x = np.linspace(-1, 1, 33)
    got = jacobi_poly(k, a, b, x)
    ref = eval_jacobi(k, a, b, x)
    assert np.max(np.abs(got - ref)) < 1e-9 * max(1.0, np.max(np.abs(ref)))


def _jy_matrix(two_j):
    # angular momentum J_y in the descending basis m = j, ..., -j
    dim = two_j + 1
    m = (two_j - 2 * np.arange(dim)) / 2.0
    j = two_j / 2.0
    jp = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        if m[col] + 1 <= j:
            jp[col - 1, col] = np.sqrt(j * (j + 1) - m[col] * (m[col] + 1))
    return (jp - jp.conj().T) / 2j


@pytest.mark.parametrize("two_j", [0, 1, 2, 3, 5, 8, 13, 20])
def test_wigner_d_matches_matrix_exponential(two_j):
    rng = np.random.default_rng(two_j)
    betas = rng.uniform(0.0, np.pi, size=4)
    got = wigner_d(two_j, betas)
    jy = _jy_matrix(two_j)
    for i, beta in enumerate(betas):
        ref = expm(-1j * beta * jy)
        assert np.max(np.abs(got[i] - ref)) < 1e-10


def test_wigner_identity_and_orthogonality():
    for two_j in [1, 4, 9]:
        d0 = wigner_d(two_j, np.array([0.0]))[0]
        assert np.max(np.abs(d0 - np.eye(two_j + 1))) < 1e-14
        d = wigner_d(two_j, np.array([1.234]))[0]
        assert np.max(np.abs(d @ d.T - np.eye(two_j + 1))) < 1e-12


def test_wigner_rejects_negative_spin():
    with pytest.raises(ValueError):
        wigner_d(-1, np.array([0.1]))
