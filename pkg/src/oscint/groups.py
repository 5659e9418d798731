"""Supported groups, their elements, and the group operations.

Two families are implemented: the flat tori T^n (n <= 3, coordinates in
[0,1)^n with addition mod 1) and SU(2) (unit quaternions; the 2x2 unitary
picture is recovered by ``su2_matrix``).

Metric conventions are pinned so that the Laplace-Beltrami spectrum is
4*pi^2*|l|^2 on T^n and l*(l+1) on SU(2).  On SU(2) this forces the geodesic
norm |x| = 2*arccos(Re tr(X)/2), giving diameter 2*pi; the heat-trace test in
the acceptance suite cross-checks the pairing of metric and spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GroupId",
    "torus",
    "SU2",
    "TorusPoint",
    "Su2Point",
    "GroupPoint",
    "identity",
    "compose",
    "invert",
    "geodesic_norm",
    "distance",
    "diameter",
    "su2_matrix",
    "quat_multiply",
    "quat_conjugate",
    "euler_to_quat",
    "quat_to_euler",
    "points_to_array",
    "array_to_points",
    "torus_norms",
    "su2_norms",
]


@dataclass(frozen=True)
class GroupId:
    """Tag identifying a supported group: ``torus(n)`` or ``SU2``."""

    kind: str  # "torus" | "su2"
    torus_dim: int = 0

    def __post_init__(self):
        if self.kind not in ("torus", "su2"):
            raise ValueError(f"unknown group kind {self.kind!r}")
        if self.kind == "torus" and not 1 <= self.torus_dim <= 3:
            raise ValueError(f"torus dimension must be in 1..3, got {self.torus_dim}")
        if self.kind == "su2" and self.torus_dim != 0:
            raise ValueError("su2 takes no dimension parameter")

    @property
    def dimension(self) -> int:
        """Manifold dimension n(G)."""
        return self.torus_dim if self.kind == "torus" else 3

    @property
    def is_torus(self) -> bool:
        return self.kind == "torus"


def torus(n: int) -> GroupId:
    return GroupId("torus", n)


SU2 = GroupId("su2")


@dataclass(frozen=True)
class TorusPoint:
    """Point of T^n; coordinates reduced mod 1 on construction."""

    coords: tuple[float, ...]

    def __post_init__(self):
        reduced = tuple(float(c) % 1.0 for c in self.coords)
        object.__setattr__(self, "coords", reduced)

    @property
    def group(self) -> GroupId:
        return torus(len(self.coords))


@dataclass(frozen=True)
class Su2Point:
    """Element of SU(2) stored as a unit quaternion (a, b, c, d).

    The matching matrix is [[a+bi, c+di], [-c+di, a-bi]]; renormalized on
    construction, rejecting near-zero input.
    """

    quat: tuple[float, float, float, float]

    def __post_init__(self):
        q = np.asarray(self.quat, dtype=float)
        nrm = float(np.linalg.norm(q))
        if not math.isfinite(nrm) or nrm < 1e-8:
            raise ValueError("quaternion norm too small to normalize")
        object.__setattr__(self, "quat", tuple((q / nrm).tolist()))

    @property
    def group(self) -> GroupId:
        return SU2


GroupPoint = TorusPoint | Su2Point


def _check_same_group(x: GroupPoint, y: GroupPoint) -> None:
    if x.group != y.group:
        raise ValueError(f"group mismatch: {x.group} vs {y.group}")


def identity(group: GroupId) -> GroupPoint:
    if group.is_torus:
        return TorusPoint((0.0,) * group.dimension)
    return Su2Point((1.0, 0.0, 0.0, 0.0))


def quat_multiply(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Hamilton product; broadcasts over leading axes of (..., 4) arrays."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    a1, b1, c1, d1 = np.moveaxis(p, -1, 0)
    a2, b2, c2, d2 = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ],
        axis=-1,
    )


def quat_conjugate(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def compose(x: GroupPoint, y: GroupPoint) -> GroupPoint:
    """Group product x*y."""
    _check_same_group(x, y)
    if isinstance(x, TorusPoint):
        return TorusPoint(tuple(a + b for a, b in zip(x.coords, y.coords)))
    return Su2Point(tuple(quat_multiply(np.array(x.quat), np.array(y.quat)).tolist()))


def invert(x: GroupPoint) -> GroupPoint:
    if isinstance(x, TorusPoint):
        return TorusPoint(tuple(-c for c in x.coords))
    return Su2Point(tuple(quat_conjugate(np.array(x.quat)).tolist()))


def torus_norms(coords: np.ndarray) -> np.ndarray:
    """Geodesic norm on T^n for an (..., n) coordinate array (coords mod 1)."""
    c = np.asarray(coords, dtype=float) % 1.0
    per_axis = np.minimum(c, 1.0 - c)
    return np.sqrt(np.sum(per_axis**2, axis=-1))


def su2_norms(quats: np.ndarray) -> np.ndarray:
    """Geodesic norm 2*arccos(a) on SU(2) for an (..., 4) quaternion array."""
    a = np.clip(np.asarray(quats, dtype=float)[..., 0], -1.0, 1.0)
    return 2.0 * np.arccos(a)


def geodesic_norm(x: GroupPoint) -> float:
    """Distance from x to the identity element."""
    if isinstance(x, TorusPoint):
        return float(torus_norms(np.array(x.coords)))
    return float(su2_norms(np.array(x.quat)))


def distance(x: GroupPoint, y: GroupPoint) -> float:
    """Bi-invariant distance d(x, y) = |y^-1 x|."""
    return geodesic_norm(compose(invert(y), x))


def diameter(group: GroupId) -> float:
    """max distance between two points: sqrt(n)/2 on T^n, 2*pi on SU(2)."""
    if group.is_torus:
        return math.sqrt(group.dimension) / 2.0
    return 2.0 * math.pi


def su2_matrix(x: Su2Point) -> np.ndarray:
    """2x2 unitary matrix of an SU(2) element."""
    a, b, c, d = x.quat
    return np.array(
        [[a + 1j * b, c + 1j * d], [-c + 1j * d, a - 1j * b]], dtype=complex
    )


def euler_to_quat(alpha, beta, gamma) -> np.ndarray:
    """Quaternion of the ZYZ Euler product Rz(alpha) Ry(beta) Rz(gamma).

    Rz(t) = exp(-i t sigma_3 / 2) and Ry(t) = exp(-i t sigma_2 / 2) in the
    matrix picture; broadcasts over array-valued angles.
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    ch, sh = np.cos(beta / 2), np.sin(beta / 2)
    u = (alpha + gamma) / 2.0
    v = (alpha - gamma) / 2.0
    return np.stack(
        [ch * np.cos(u), -ch * np.sin(u), -sh * np.cos(v), sh * np.sin(v)],
        axis=-1,
    )


def quat_to_euler(quats: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """ZYZ Euler angles (alpha, beta, gamma) with beta in [0, pi].

    Exact inverse of ``euler_to_quat`` up to the usual chart ambiguity at
    beta = 0 or pi, where gamma is folded into alpha.
    """
    q = np.asarray(quats, dtype=float)
    a, b, c, d = np.moveaxis(q, -1, 0)
    ch = np.hypot(a, b)
    sh = np.hypot(c, d)
    beta = 2.0 * np.arctan2(sh, ch)
    u = np.arctan2(-b, a)
    v = np.arctan2(d, -c)
    # at the poles one angle is free; arctan2(0, 0) = 0 picks the canonical lift
    return u + v, beta, u - v


def points_to_array(group: GroupId, points) -> np.ndarray:
    """Stack GroupPoints into a raw (N, n) or (N, 4) float array."""
    if group.is_torus:
        return np.array([p.coords for p in points], dtype=float)
    return np.array([p.quat for p in points], dtype=float)


def array_to_points(group: GroupId, arr: np.ndarray) -> list[GroupPoint]:
    arr = np.asarray(arr, dtype=float)
    if group.is_torus:
        return [TorusPoint(tuple(row)) for row in arr]
    return [Su2Point(tuple(row)) for row in arr]
