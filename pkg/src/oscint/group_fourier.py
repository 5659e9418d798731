"""Group Fourier transform, Plancherel energy, and convolution.

Coefficients are dense d x d matrices keyed by dual index.  The forward
transform is plain quadrature of f(x) xi(x)^*; the inverse is the series
sum_xi d_xi Tr[xi(x) fhat(xi)].  Convolution f * K (kernel acting on the
right, (f*K)(x) = int f(y) K(y^-1 x) dy) multiplies coefficients with the
kernel factor on the left: khat(xi) @ fhat(xi).  ``convolve_direct`` keeps
the defining integral alive as an independent cross-check.

All reductions run in fixed grid/index order, so repeated evaluations are
bit-identical.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .dual_spectrum import (
    DualIndex,
    Su2Spin,
    TorusFreq,
    enumerate_dual,
    representation_matrices,
    spectral_data,
)
from .errors import NumericalFailure
from .group_domain import QuadratureGrid
from .groups import (
    GroupId,
    GroupPoint,
    Su2Point,
    TorusPoint,
    quat_conjugate,
    quat_multiply,
    torus,
)

__all__ = [
    "GridFunction",
    "FourierCoefficients",
    "forward_transform",
    "inverse_transform",
    "plancherel_energy",
    "convolve_fourier",
    "convolve_direct",
    "left_translate_coefficients",
    "evaluate_coefficients",
    "coefficients_to_json",
    "coefficients_from_json",
]


@dataclass
class GridFunction:
    """Complex samples of a function on a quadrature grid."""

    grid: QuadratureGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.size,):
            raise ValueError(
                f"values shape {self.values.shape} does not match grid size "
                f"{self.grid.size}"
            )
        if not np.all(np.isfinite(self.values)):
            raise NumericalFailure("grid function contains non-finite entries")

    def l1_norm(self) -> float:
        return float(np.sum(self.grid.weights * np.abs(self.values)))

    def l2_norm(self) -> float:
        return math.sqrt(float(np.sum(self.grid.weights * np.abs(self.values) ** 2)))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def mean(self) -> complex:
        return complex(np.sum(self.grid.weights * self.values))


@dataclass
class FourierCoefficients:
    """Map dual index -> d x d matrix, together with the bandwidth used."""

    group: GroupId
    bandwidth: float
    entries: dict[DualIndex, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        for xi, mat in self.entries.items():
            d = spectral_data(self.group, xi)
            if d.weight > self.bandwidth * (1 + 1e-12):
                raise ValueError(f"index {xi} exceeds bandwidth {self.bandwidth}")
            mat = np.asarray(mat, dtype=complex)
            if mat.shape != (d.dim, d.dim):
                raise ValueError(
                    f"entry for {xi} has shape {mat.shape}, want ({d.dim},{d.dim})"
                )
            self.entries[xi] = mat

    def copy_scaled(self, factor_fn) -> "FourierCoefficients":
        """New coefficients with each entry multiplied by factor_fn(xi)."""
        return FourierCoefficients(
            self.group,
            self.bandwidth,
            {xi: factor_fn(xi) * mat for xi, mat in self.entries.items()},
        )


def forward_transform(f: GridFunction, bandwidth: float) -> FourierCoefficients:
    """fhat(xi) = int f(x) xi(x)^* dx for every weight <= bandwidth."""
    grid = f.grid
    grid.require_bandwidth(bandwidth)
    wf = grid.weights * f.values
    entries: dict[DualIndex, np.ndarray] = {}
    for xi in enumerate_dual(grid.group, bandwidth):
        tab = grid.representation_table(xi)
        # (xi(x)^*)_{ab} = conj(xi(x)_{ba})
        entries[xi] = np.einsum("x,xba->ab", wf, np.conj(tab))
    return FourierCoefficients(grid.group, bandwidth, entries)


def inverse_transform(coeffs: FourierCoefficients, grid: QuadratureGrid) -> GridFunction:
    """f(x) = sum_xi d_xi Tr[xi(x) fhat(xi)] over the stored entries."""
    if coeffs.group != grid.group:
        raise ValueError("coefficients/grid group mismatch")
    values = np.zeros(grid.size, dtype=complex)
    for xi, mat in coeffs.entries.items():
        d = spectral_data(grid.group, xi).dim
        tab = grid.representation_table(xi)
        values += d * np.einsum("xab,ba->x", tab, mat)
    return GridFunction(grid, values)


def evaluate_coefficients(coeffs: FourierCoefficients, pts: np.ndarray) -> np.ndarray:
    """Evaluate the inversion series at arbitrary raw points (off-grid OK)."""
    pts = np.asarray(pts, dtype=float)
    values = np.zeros(pts.shape[0], dtype=complex)
    for xi, mat in coeffs.entries.items():
        d = spectral_data(coeffs.group, xi).dim
        tab = representation_matrices(coeffs.group, xi, pts)
        values += d * np.einsum("xab,ba->x", tab, mat)
    return values


def plancherel_energy(coeffs: FourierCoefficients) -> float:
    """sum_xi d_xi ||fhat(xi)||_HS^2 (= squared L^2 norm for exact data)."""
    total = 0.0
    for xi in sorted(coeffs.entries):
        d = spectral_data(coeffs.group, xi).dim
        total += d * float(np.sum(np.abs(coeffs.entries[xi]) ** 2))
    return total


def convolve_fourier(
    fhat: FourierCoefficients, khat: FourierCoefficients
) -> FourierCoefficients:
    """Coefficients of f * K: kernel factor on the left, khat(xi) @ fhat(xi)."""
    if fhat.group != khat.group:
        raise ValueError("group mismatch in convolution")
    if fhat.bandwidth != khat.bandwidth:
        raise ValueError(
            f"bandwidth mismatch: {fhat.bandwidth} vs {khat.bandwidth}"
        )
    entries = {}
    for xi, fmat in fhat.entries.items():
        kmat = khat.entries.get(xi)
        if kmat is not None:
            entries[xi] = kmat @ fmat
    return FourierCoefficients(fhat.group, fhat.bandwidth, entries)


def left_translate_coefficients(
    khat: FourierCoefficients, y: GroupPoint
) -> FourierCoefficients:
    """Coefficients of x -> K(y^-1 x); each entry becomes khat(xi) xi(y)^*."""
    from .dual_spectrum import representation_matrix

    entries = {}
    for xi, mat in khat.entries.items():
        rep_y = representation_matrix(khat.group, xi, y)
        entries[xi] = mat @ rep_y.conj().T
    return FourierCoefficients(khat.group, khat.bandwidth, entries)


def _translated_kernel_matrix(
    K: GridFunction, bandwidth: float
) -> np.ndarray:
    """Matrix M[x, y] = K_L(y^-1 x) on the grid via band-limited resynthesis."""
    grid = K.grid
    khat = forward_transform(K, bandwidth)
    n = grid.size
    M = np.zeros((n, n), dtype=complex)
    for xi, kmat in khat.entries.items():
        d = spectral_data(grid.group, xi).dim
        tab = grid.representation_table(xi)
        # K(y^-1 x) = sum_xi d Tr[xi(x) khat xi(y)^*]
        right = np.einsum("ab,ycb->yac", kmat, np.conj(tab))
        M += d * np.einsum("xab,yba->xy", tab, right)
    return M


def _nearest_kernel_matrix(K: GridFunction) -> np.ndarray:
    """Diagnostic mode: K(y^-1 x) looked up at the nearest grid point."""
    grid = K.grid
    if grid.group.is_torus:
        step = 2 * grid.order
        idx = np.round(grid.xs * step).astype(int) % step
        n_axes = grid.xs.shape[1]
        flat = np.zeros(grid.size, dtype=int)
        for a in range(n_axes):
            flat = flat * step + idx[:, a]
        lookup = np.empty(step**n_axes, dtype=int)
        lookup[flat] = np.arange(grid.size)
        diff_idx = (idx[:, None, :] - idx[None, :, :]) % step
        flat_diff = np.zeros((grid.size, grid.size), dtype=int)
        for a in range(n_axes):
            flat_diff = flat_diff * step + diff_idx[..., a]
        return K.values[lookup[flat_diff]]
    from scipy.spatial import cKDTree

    tree = cKDTree(grid.xs)
    M = np.empty((grid.size, grid.size), dtype=complex)
    for j in range(grid.size):
        yinv = quat_conjugate(grid.xs[j])
        z = quat_multiply(yinv[None, :], grid.xs)
        # antipodal quaternions are distinct SU(2) elements; Euclidean NN in
        # R^4 is monotone with the geodesic distance, so the tree applies
        _, nearest = tree.query(z)
        M[:, j] = K.values[nearest]
    return M


def convolve_direct(
    f: GridFunction,
    K: GridFunction,
    mode: str = "resynthesis",
    bandwidth: float | None = None,
) -> GridFunction:
    """Quadrature of the defining integral (f*K)(x) = sum_y w_y f(y) K(y^-1 x).

    ``mode='resynthesis'`` (default) evaluates K at y^-1 x through its
    band-limited inversion series at ``bandwidth`` (grid maximum if omitted);
    ``mode='nearest'`` samples the nearest grid value and exists only for
    diagnostics (it is exact on the torus, crude on SU(2)).
    """
    if f.grid is not K.grid:
        raise ValueError("convolve_direct requires both functions on one grid")
    if mode == "resynthesis":
        M = _translated_kernel_matrix(K, bandwidth if bandwidth is not None else f.grid.max_bandwidth)
    elif mode == "nearest":
        M = _nearest_kernel_matrix(K)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return GridFunction(f.grid, M @ (f.grid.weights * f.values))


def _index_to_json(xi: DualIndex):
    if isinstance(xi, TorusFreq):
        return list(xi.ell)
    return xi.two_l


def _index_from_json(group: GroupId, obj) -> DualIndex:
    if group.is_torus:
        return TorusFreq(tuple(obj))
    return Su2Spin(int(obj))


def coefficients_to_json(coeffs: FourierCoefficients) -> str:
    group = (
        {"kind": "torus", "n": coeffs.group.dimension}
        if coeffs.group.is_torus
        else {"kind": "su2"}
    )
    entries = []
    for xi in sorted(coeffs.entries):
        mat = coeffs.entries[xi]
        entries.append(
            {
                "index": _index_to_json(xi),
                "re": mat.real.tolist(),
                "im": mat.imag.tolist(),
            }
        )
    return json.dumps(
        {"group": group, "bandwidth": coeffs.bandwidth, "entries": entries}
    )


def coefficients_from_json(text: str) -> FourierCoefficients:
    obj = json.loads(text)
    g = obj["group"]
    group = torus(g["n"]) if g["kind"] == "torus" else GroupId("su2")
    entries = {}
    for item in obj["entries"]:
        xi = _index_from_json(group, item["index"])
        entries[xi] = np.array(item["re"]) + 1j * np.array(item["im"])
    return FourierCoefficients(group, float(obj["bandwidth"]), entries)
