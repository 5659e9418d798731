"""Unitary duals of the supported groups: indices, spectra, representations.

Dual indices are torus frequencies l in Z^n or SU(2) spins stored as the
doubled integer two_l (so half-integers never appear as float keys).  The
elliptic weight of an index is <xi> = sqrt(1 + lambda), with Laplace
eigenvalue lambda = 4*pi^2*|l|^2 on T^n and lambda = l(l+1) on SU(2).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .groups import (
    SU2,
    GroupId,
    GroupPoint,
    Su2Point,
    TorusPoint,
    quat_to_euler,
)
from .wigner import wigner_d

__all__ = [
    "TorusFreq",
    "Su2Spin",
    "DualIndex",
    "SpectralData",
    "enumerate_dual",
    "spectral_data",
    "representation_matrix",
    "representation_matrices",
    "characters",
    "max_index_order",
    "required_grid_order",
]

_FOUR_PI_SQ = 4.0 * math.pi**2


@dataclass(frozen=True, order=True)
class TorusFreq:
    """Frequency vector l in Z^n indexing the character e^{2 pi i l.x}."""

    ell: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "ell", tuple(int(v) for v in self.ell))


@dataclass(frozen=True, order=True)
class Su2Spin:
    """Spin l = two_l / 2 indexing the (2l+1)-dimensional representation."""

    two_l: int

    def __post_init__(self):
        if self.two_l < 0:
            raise ValueError("two_l must be nonnegative")

    @property
    def spin(self) -> float:
        return self.two_l / 2.0


DualIndex = TorusFreq | Su2Spin


@dataclass(frozen=True)
class SpectralData:
    dim: int
    eigenvalue: float
    weight: float  # sqrt(1 + eigenvalue)


def _check_index(group: GroupId, xi: DualIndex) -> None:
    if group.is_torus:
        if not isinstance(xi, TorusFreq):
            raise ValueError(f"expected a torus frequency for {group}, got {xi!r}")
        if len(xi.ell) != group.dimension:
            raise ValueError(
                f"frequency length {len(xi.ell)} does not match torus dimension "
                f"{group.dimension}"
            )
    else:
        if not isinstance(xi, Su2Spin):
            raise ValueError(f"expected an SU(2) spin for {group}, got {xi!r}")


def spectral_data(group: GroupId, xi: DualIndex) -> SpectralData:
    """Dimension, Laplace eigenvalue, and elliptic weight of one index."""
    _check_index(group, xi)
    if isinstance(xi, TorusFreq):
        lam = _FOUR_PI_SQ * float(sum(v * v for v in xi.ell))
        return SpectralData(dim=1, eigenvalue=lam, weight=math.sqrt(1.0 + lam))
    l = xi.two_l / 2.0
    lam = l * (l + 1.0)
    return SpectralData(dim=xi.two_l + 1, eigenvalue=lam, weight=math.sqrt(1.0 + lam))


def max_index_order(group: GroupId, bandwidth: float) -> int:
    """Largest per-axis |l_i| (torus) or two_l (SU(2)) with weight <= bandwidth.

    The weight is monotone in the order, so this caps the enumeration box.
    """
    lam_max = bandwidth * bandwidth - 1.0
    if lam_max < 0:
        return -1
    if group.is_torus:
        return int(math.floor(math.sqrt(lam_max / _FOUR_PI_SQ) + 1e-12))
    two_l = 0
    while True:
        l = (two_l + 1) / 2.0
        if l * (l + 1.0) > lam_max * (1 + 1e-15):
            return two_l
        two_l += 1


def enumerate_dual(group: GroupId, bandwidth: float) -> list[DualIndex]:
    """All dual indices with weight <= bandwidth, in canonical order.

    Torus frequencies come out lexicographically, SU(2) spins by increasing
    two_l; the trivial representation is always present (bandwidth >= 1).
    """
    if bandwidth < 1.0:
        raise ValueError(f"bandwidth must be >= 1, got {bandwidth}")
    m = max_index_order(group, bandwidth)
    if group.is_torus:
        n = group.dimension
        lam_max = (bandwidth * bandwidth - 1.0) / _FOUR_PI_SQ
        out = [
            TorusFreq(ell)
            for ell in itertools.product(range(-m, m + 1), repeat=n)
            if sum(v * v for v in ell) <= lam_max * (1 + 1e-15)
        ]
        out.sort()
        return out
    return [Su2Spin(two_l) for two_l in range(m + 1)]


def representation_matrices(group: GroupId, xi: DualIndex, pts: np.ndarray) -> np.ndarray:
    """Representation matrices at a batch of points given as a raw array.

    ``pts`` has shape (N, n) of torus coordinates or (N, 4) of unit
    quaternions; the result has shape (N, d, d) complex.
    """
    _check_index(group, xi)
    pts = np.asarray(pts, dtype=float)
    if isinstance(xi, TorusFreq):
        phase = np.exp(2j * math.pi * (pts @ np.array(xi.ell, dtype=float)))
        return phase.reshape(-1, 1, 1)
    alpha, beta, gamma = quat_to_euler(pts)
    return _su2_matrices(xi.two_l, alpha, beta, gamma)


def _su2_matrices(two_l: int, alpha, beta, gamma) -> np.ndarray:
    """Assemble D^l = e^{-i m' alpha} d^l(beta) e^{-i m gamma}, m descending."""
    d = wigner_d(two_l, beta)
    m = (two_l - 2 * np.arange(two_l + 1)) / 2.0
    left = np.exp(-1j * np.multiply.outer(np.asarray(alpha, dtype=float), m))
    right = np.exp(-1j * np.multiply.outer(np.asarray(gamma, dtype=float), m))
    return left[..., :, None] * d * right[..., None, :]


def representation_matrix(group: GroupId, xi: DualIndex, x: GroupPoint) -> np.ndarray:
    """The unitary matrix xi(x), shape (d, d)."""
    if group.is_torus:
        if not isinstance(x, TorusPoint):
            raise ValueError("point/group variant mismatch")
        pts = np.array([x.coords], dtype=float)
    else:
        if not isinstance(x, Su2Point):
            raise ValueError("point/group variant mismatch")
        pts = np.array([x.quat], dtype=float)
    return representation_matrices(group, xi, pts)[0]


def characters(group: GroupId, xi: DualIndex, pts: np.ndarray) -> np.ndarray:
    """Character Tr xi(.) on a batch of raw points.

    On SU(2) this is the Chebyshev polynomial U_{2l} of the quaternion real
    part (the Weyl character formula), which sidesteps building matrices.
    """
    _check_index(group, xi)
    pts = np.asarray(pts, dtype=float)
    if isinstance(xi, TorusFreq):
        return np.exp(2j * math.pi * (pts @ np.array(xi.ell, dtype=float)))
    from scipy.special import eval_chebyu

    return eval_chebyu(xi.two_l, pts[..., 0]).astype(complex)


def required_grid_order(group: GroupId, bandwidth: float) -> int:
    """Minimal grid parameter B whose quadrature is exact for all pairwise
    products of matrix coefficients up to the given bandwidth."""
    return max_index_order(group, bandwidth) + 1
