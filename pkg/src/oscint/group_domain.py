"""Haar quadrature grids, metric balls, and ball volumes.

Grids integrate products of representation matrix coefficients exactly
(up to roundoff) for all indices of per-axis order <= B-1, i.e. torus
frequencies with |l_i| <= B-1 and SU(2) spins with 2l <= B-1 pairwise.
The torus rule is the uniform tensor grid with (2B)^n points; the SU(2)
rule is a ZYZ Euler product grid, uniform in alpha over [0, 2pi) and in
gamma over [0, 4pi) (2B points each, covering the double cover), with B
Gauss-Legendre nodes in cos(beta).
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .dual_spectrum import DualIndex, max_index_order
from .errors import ResolutionError
from .groups import (
    GroupId,
    GroupPoint,
    array_to_points,
    euler_to_quat,
    geodesic_norm,
    diameter,
    su2_norms,
    torus_norms,
)

__all__ = [
    "QuadratureGrid",
    "Ball",
    "build_grid",
    "ball_volume",
    "points_in_ball",
    "grid_to_csv",
]


class QuadratureGrid:
    """Immutable quadrature rule: raw point array, weights, resolution B.

    ``xs`` holds torus coordinates (N, n) or quaternions (N, 4); weights are
    positive and sum to 1 (normalized Haar).  Representation/character tables
    are memoized per dual index on first use.
    """

    def __init__(self, group: GroupId, xs: np.ndarray, weights: np.ndarray, order: int):
        self.group = group
        self.xs = np.asarray(xs, dtype=float)
        self.weights = np.asarray(weights, dtype=float)
        self.order = int(order)
        if self.xs.shape[0] != self.weights.shape[0]:
            raise ValueError("points/weights length mismatch")
        if np.any(self.weights <= 0):
            raise ValueError("weights must be positive")
        if abs(self.weights.sum() - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1 (normalized Haar)")
        self._norms: np.ndarray | None = None
        self._rep_cache: dict[DualIndex, np.ndarray] = {}
        self._char_cache: dict[DualIndex, np.ndarray] = {}

    def __len__(self) -> int:
        return self.xs.shape[0]

    @property
    def size(self) -> int:
        return self.xs.shape[0]

    @property
    def points(self) -> list[GroupPoint]:
        return array_to_points(self.group, self.xs)

    @property
    def norms(self) -> np.ndarray:
        """Geodesic distances of the grid points to the identity."""
        if self._norms is None:
            if self.group.is_torus:
                self._norms = torus_norms(self.xs)
            else:
                self._norms = su2_norms(self.xs)
        return self._norms

    @property
    def mesh(self) -> float:
        """Heuristic covering radius of the point set (used in error reports)."""
        if self.group.is_torus:
            return math.sqrt(self.group.dimension) / (4.0 * self.order)
        return 1.5 * math.pi / self.order

    def supports_bandwidth(self, bandwidth: float) -> bool:
        return max_index_order(self.group, bandwidth) <= self.order - 1

    @property
    def max_bandwidth(self) -> float:
        """Largest weight whose full dual ball is integrated exactly in pairs."""
        m = self.order - 1
        if self.group.is_torus:
            return math.sqrt(1.0 + 4.0 * math.pi**2 * m * m)
        return math.sqrt(1.0 + (m / 2.0) * (m / 2.0 + 1.0))

    def require_bandwidth(self, bandwidth: float) -> None:
        from .dual_spectrum import required_grid_order

        if not self.supports_bandwidth(bandwidth):
            need = required_grid_order(self.group, bandwidth)
            raise ResolutionError(
                f"grid order B={self.order} cannot resolve bandwidth "
                f"{bandwidth:g}; need B >= {need}",
                required_b=need,
            )

    def representation_table(self, xi: DualIndex) -> np.ndarray:
        """Cached (N, d, d) matrices of one representation on the grid."""
        tab = self._rep_cache.get(xi)
        if tab is None:
            from .dual_spectrum import representation_matrices

            tab = representation_matrices(self.group, xi, self.xs)
            self._rep_cache[xi] = tab
        return tab

    def character_table(self, xi: DualIndex) -> np.ndarray:
        tab = self._char_cache.get(xi)
        if tab is None:
            from .dual_spectrum import characters

            tab = characters(self.group, xi, self.xs)
            self._char_cache[xi] = tab
        return tab


@dataclass(frozen=True)
class Ball:
    """Metric ball; radius must not exceed the group diameter."""

    center: GroupPoint
    radius: float

    def __post_init__(self):
        if not 0 < self.radius <= diameter(self.center.group) * (1 + 1e-12):
            raise ValueError(
                f"radius must lie in (0, diameter]; got {self.radius} for "
                f"{self.center.group}"
            )


def build_grid(group: GroupId, order: int) -> QuadratureGrid:
    """Quadrature grid at resolution B = order (B >= 2)."""
    if order < 2:
        raise ValueError(f"grid order must be >= 2, got {order}")
    if group.is_torus:
        n = group.dimension
        side = np.arange(2 * order) / (2.0 * order)
        axes = np.meshgrid(*([side] * n), indexing="ij")
        xs = np.stack([a.ravel() for a in axes], axis=-1)
        w = np.full(xs.shape[0], 1.0 / xs.shape[0])
        return QuadratureGrid(group, xs, w, order)
    # SU(2): alpha in [0, 2pi), gamma in [0, 4pi), Gauss-Legendre in cos(beta)
    two_b = 2 * order
    alphas = 2.0 * math.pi * np.arange(two_b) / two_b
    gammas = 4.0 * math.pi * np.arange(two_b) / two_b
    nodes, glw = np.polynomial.legendre.leggauss(order)
    betas = np.arccos(nodes)
    A, Bb, C = np.meshgrid(alphas, betas, gammas, indexing="ij")
    xs = euler_to_quat(A.ravel(), Bb.ravel(), C.ravel())
    wb = glw / 2.0  # integrates d(cos beta)/2 over [-1, 1]
    W = np.meshgrid(
        np.full(two_b, 1.0 / two_b), wb, np.full(two_b, 1.0 / two_b), indexing="ij"
    )
    w = (W[0] * W[1] * W[2]).ravel()
    return QuadratureGrid(group, xs, w, order)


def _disc_square_area(rho: float) -> float:
    """Area of {|x| <= rho} inside the square [-1/2, 1/2]^2."""
    if rho <= 0:
        return 0.0
    if rho <= 0.5:
        return math.pi * rho * rho
    if rho >= math.sqrt(2.0) / 2.0:
        return 1.0
    seg = rho * rho * math.acos(0.5 / rho) - 0.5 * math.sqrt(rho * rho - 0.25)
    return math.pi * rho * rho - 4.0 * seg


def ball_volume(group: GroupId, r: float) -> float:
    """Normalized Haar volume of a ball of radius r."""
    if r <= 0:
        raise ValueError(f"radius must be positive, got {r}")
    if group.is_torus:
        n = group.dimension
        r = min(r, diameter(group))
        if n == 1:
            return min(2.0 * r, 1.0)
        if n == 2:
            return _disc_square_area(r)
        # n == 3: integrate the 2-d cross-section area over the third axis
        from scipy.integrate import quad

        t_max = min(r, 0.5)
        val, _ = quad(
            lambda t: _disc_square_area(math.sqrt(max(r * r - t * t, 0.0))),
            -t_max,
            t_max,
            limit=200,
        )
        return min(val, 1.0)
    r = min(r, 2.0 * math.pi)
    return (r - math.sin(r)) / (2.0 * math.pi)


def points_in_ball(grid: QuadratureGrid, ball: Ball) -> np.ndarray:
    """Boolean mask of grid points inside the (closed) ball."""
    if ball.center.group != grid.group:
        raise ValueError("ball/grid group mismatch")
    if grid.group.is_torus:
        c = np.asarray(ball.center.coords, dtype=float)
        d = torus_norms(grid.xs - c)
    else:
        from .groups import quat_conjugate, quat_multiply

        cinv = quat_conjugate(np.asarray(ball.center.quat, dtype=float))
        d = su2_norms(quat_multiply(cinv[None, :], grid.xs))
    return d <= ball.radius


def grid_to_csv(grid: QuadratureGrid) -> str:
    """Debug dump: one row per point, coordinates then weight."""
    buf = io.StringIO()
    ncols = grid.xs.shape[1]
    header = [f"x{i}" for i in range(ncols)] if grid.group.is_torus else ["qa", "qb", "qc", "qd"]
    buf.write(",".join(header + ["weight"]) + "\n")
    for row, w in zip(grid.xs, grid.weights):
        buf.write(",".join(repr(float(v)) for v in row) + f",{w!r}\n")
    return buf.getvalue()
