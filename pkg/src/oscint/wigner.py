"""Wigner d-matrices for SU(2) via Jacobi polynomials in cos(beta).

The small-d entries are evaluated through the classical closed form

    d^j_{m',m}(beta) = N * (sin b/2)^(m-m') * (cos b/2)^(m+m')
                         * P_{j-m}^{(m-m', m+m')}(cos beta),

valid for m >= |m'|, with the other index regions reached by the symmetries
d_{m'm} = (-1)^(m'-m) d_{mm'} = d_{-m,-m'}.  The Jacobi polynomial is run
through its three-term recurrence, which stays well conditioned at the
degrees used here (j up to a few tens).  Basis ordering is descending,
m = j, j-1, ..., -j, so the spin-1/2 matrix coincides with the defining 2x2
representation.

Half-integer spins are indexed by the doubled integer two_j.
"""

from __future__ import annotations

from math import factorial, sqrt

import numpy as np

__all__ = ["jacobi_poly", "wigner_d"]


def jacobi_poly(k: int, a: int, b: int, x: np.ndarray) -> np.ndarray:
    """Jacobi polynomial P_k^{(a,b)} evaluated by forward recurrence."""
    x = np.asarray(x, dtype=float)
    if k == 0:
        return np.ones_like(x)
    p_prev = np.ones_like(x)
    p = 0.5 * (a - b + (a + b + 2) * x)
    for m in range(2, k + 1):
        c1 = 2 * m * (m + a + b) * (2 * m + a + b - 2)
        c2 = (2 * m + a + b - 1) * (a * a - b * b)
        c3 = (2 * m + a + b - 2) * (2 * m + a + b - 1) * (2 * m + a + b)
        c4 = 2 * (m + a - 1) * (m + b - 1) * (2 * m + a + b)
        p, p_prev = ((c2 + c3 * x) * p - c4 * p_prev) / c1, p
    return p


def _d_entry(two_j: int, two_mp: int, two_m: int, cos_b, sin_half, cos_half):
    """One small-d entry, vectorized over the angle arrays."""
    sign = 1.0
    if two_m < two_mp:
        if ((two_mp - two_m) // 2) % 2:
            sign = -1.0
        two_mp, two_m = two_m, two_mp
    if two_m + two_mp < 0:
        two_mp, two_m = -two_m, -two_mp
    a = (two_m - two_mp) // 2
    b = (two_m + two_mp) // 2
    k = (two_j - two_m) // 2
    norm = sqrt(
        factorial((two_j + two_m) // 2)
        * factorial((two_j - two_m) // 2)
        / factorial((two_j + two_mp) // 2)
        / factorial((two_j - two_mp) // 2)
    )
    return sign * norm * sin_half**a * cos_half**b * jacobi_poly(k, a, b, cos_b)


def wigner_d(two_j: int, beta) -> np.ndarray:
    """Small-d matrix d^j(beta), shape (..., 2j+1, 2j+1), rows m' descending."""
    if two_j < 0:
        raise ValueError("two_j must be nonnegative")
    beta = np.asarray(beta, dtype=float)
    dim = two_j + 1
    cos_b = np.cos(beta)
    sin_half = np.sin(beta / 2)
    cos_half = np.cos(beta / 2)
    out = np.empty(beta.shape + (dim, dim), dtype=float)
    for i in range(dim):
        two_mp = two_j - 2 * i
        for j in range(dim):
            two_m = two_j - 2 * j
            out[..., i, j] = _d_entry(two_j, two_mp, two_m, cos_b, sin_half, cos_half)
    return out
