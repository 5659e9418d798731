"""Forward/inverse transforms, Plancherel, and convolution cross-checks."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oscint.dual_spectrum import Su2Spin, TorusFreq, enumerate_dual, spectral_data
from oscint.errors import ResolutionError
from oscint.group_fourier import (
    FourierCoefficients,
    GridFunction,
    coefficients_from_json,
    coefficients_to_json,
    convolve_direct,
    convolve_fourier,
    forward_transform,
    inverse_transform,
    left_translate_coefficients,
    plancherel_energy,
)
from oscint.groups import SU2, TorusPoint, torus


def random_band_limited(grid, bandwidth, rng):
    entries = {}
    for xi in enumerate_dual(grid.group, bandwidth):
        d = spectral_data(grid.group, xi).dim
        entries[xi] = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return FourierCoefficients(grid.group, bandwidth, entries)


def test_forward_constant_function(t1_grid):
    f = GridFunction(t1_grid, np.ones(t1_grid.size, dtype=complex))
    fhat = forward_transform(f, 16.0)
    for xi, mat in fhat.entries.items():
        expect = 1.0 if xi == TorusFreq((0,)) else 0.0
        assert abs(mat[0, 0] - expect) < 1e-10


def test_forward_exponential(t1_grid):
    x = t1_grid.xs[:, 0]
    f = GridFunction(t1_grid, np.exp(2j * np.pi * 3 * x))
    fhat = forward_transform(f, 32.0)
    for xi, mat in fhat.entries.items():
        expect = 1.0 if xi == TorusFreq((3,)) else 0.0
        assert abs(mat[0, 0] - expect) < 1e-12
    assert abs(plancherel_energy(fhat) - 1.0) < 1e-12


def test_forward_su2_character(su2_grid):
    # Schur orthogonality oracle: the character of spin 1/2 transforms to I/2
    chi = su2_grid.character_table(Su2Spin(1))
    f = GridFunction(su2_grid, chi)
    fhat = forward_transform(f, su2_grid.max_bandwidth)
    for xi, mat in fhat.entries.items():
        if xi == Su2Spin(1):
            assert np.max(np.abs(mat - np.eye(2) / 2)) < 1e-12
        else:
            assert np.max(np.abs(mat)) < 1e-12
    assert abs(plancherel_energy(fhat) - 1.0) < 1e-12
    back = inverse_transform(fhat, su2_grid)
    assert np.max(np.abs(back.values - chi)) < 1e-10


def test_forward_requires_resolution(t1_grid):
    f = GridFunction(t1_grid, np.ones(t1_grid.size, dtype=complex))
    with pytest.raises(ResolutionError):
        forward_transform(f, 1e4)


def test_inverse_constant_and_roundtrip(su2_grid, rng):
    coeffs = FourierCoefficients(SU2, 1.0, {Su2Spin(0): np.array([[2.5 - 1j]])})
    f = inverse_transform(coeffs, su2_grid)
    assert np.max(np.abs(f.values - (2.5 - 1j))) < 1e-14

    bl = random_band_limited(su2_grid, su2_grid.max_bandwidth, rng)
    f = inverse_transform(bl, su2_grid)
    back = forward_transform(f, su2_grid.max_bandwidth)
    for xi in bl.entries:
        assert np.max(np.abs(back.entries[xi] - bl.entries[xi])) < 1e-9


def test_plancherel_identity_random(t2_grid, su2_grid, rng):
    for grid in (t2_grid, su2_grid):
        for _ in range(5):
            bl = random_band_limited(grid, grid.max_bandwidth / 2, rng)
            f = inverse_transform(bl, grid)
            e_grid = f.l2_norm() ** 2
            e_spec = plancherel_energy(forward_transform(f, grid.max_bandwidth / 2))
            assert abs(e_grid - e_spec) <= 1e-8 * e_grid


def test_inner_product_identity(t1_grid, rng):
    # <f, g>_{L^2} = sum_xi d Tr[fhat ghat^*]
    f = inverse_transform(random_band_limited(t1_grid, 20.0, rng), t1_grid)
    g = inverse_transform(random_band_limited(t1_grid, 20.0, rng), t1_grid)
    lhs = np.sum(t1_grid.weights * f.values * np.conj(g.values))
    fh, gh = forward_transform(f, 20.0), forward_transform(g, 20.0)
    rhs = sum(
        spectral_data(t1_grid.group, xi).dim * np.trace(fh.entries[xi] @ gh.entries[xi].conj().T)
        for xi in fh.entries
    )
    assert abs(lhs - rhs) < 1e-10 * max(1.0, abs(lhs))


@given(st.complex_numbers(max_magnitude=5.0), st.complex_numbers(max_magnitude=5.0))
@settings(max_examples=20, deadline=None)
def test_linearity(a, b):
    grid = _LINEARITY_GRID
    f, g = _LINEARITY_FUNCS
    lhs = forward_transform(GridFunction(grid, a * f.values + b * g.values), 16.0)
    fh = forward_transform(f, 16.0)
    gh = forward_transform(g, 16.0)
    for xi in lhs.entries:
        expect = a * fh.entries[xi] + b * gh.entries[xi]
        assert np.max(np.abs(lhs.entries[xi] - expect)) < 1e-9


def _make_linearity_fixture():
    from oscint.group_domain import build_grid

    grid = build_grid(torus(1), 16)
    rng = np.random.default_rng(7)
    f = inverse_transform(random_band_limited(grid, 16.0, rng), grid)
    g = inverse_transform(random_band_limited(grid, 16.0, rng), grid)
    return grid, (f, g)


_LINEARITY_GRID, _LINEARITY_FUNCS = _make_linearity_fixture()


def test_convolution_trivial_cases(t1_grid):
    x = t1_grid.xs[:, 0]
    f = GridFunction(t1_grid, np.exp(2j * np.pi * 2 * x))
    zero = GridFunction(t1_grid, np.zeros(t1_grid.size, dtype=complex))
    assert convolve_direct(f, zero).sup_norm() == 0.0

    ones = GridFunction(t1_grid, np.ones(t1_grid.size, dtype=complex))
    k = GridFunction(t1_grid, np.exp(2j * np.pi * x) + 0.3)
    conv = convolve_direct(ones, k)
    mean_k = k.mean()
    assert np.max(np.abs(conv.values - mean_k)) < 1e-12

    # e_2 * e_2 = e_2 by the defining integral
    conv = convolve_direct(f, f)
    assert np.max(np.abs(conv.values - f.values)) < 1e-12


def test_convolution_fourier_vs_direct(t1_grid, su2_grid, rng):
    for grid, tol in ((t1_grid, 1e-10), (su2_grid, 1e-10)):
        L = grid.max_bandwidth / 2
        f = inverse_transform(random_band_limited(grid, L, rng), grid)
        k = inverse_transform(random_band_limited(grid, L, rng), grid)
        direct = convolve_direct(f, k, bandwidth=L)
        four = inverse_transform(
            convolve_fourier(forward_transform(f, L), forward_transform(k, L)), grid
        )
        scale = max(four.sup_norm(), 1e-300)
        assert np.max(np.abs(direct.values - four.values)) / scale < tol


def test_convolution_kernel_factor_on_left(su2_grid, rng):
    # order matters on a nonabelian group: khat @ fhat, never fhat @ khat
    L = su2_grid.max_bandwidth / 2
    f = inverse_transform(random_band_limited(su2_grid, L, rng), su2_grid)
    k = inverse_transform(random_band_limited(su2_grid, L, rng), su2_grid)
    fh, kh = forward_transform(f, L), forward_transform(k, L)
    direct = convolve_direct(f, k, bandwidth=L)
    good = inverse_transform(convolve_fourier(fh, kh), su2_grid)
    swapped = inverse_transform(
        FourierCoefficients(SU2, L, {xi: fh.entries[xi] @ kh.entries[xi] for xi in fh.entries}),
        su2_grid,
    )
    assert np.max(np.abs(direct.values - good.values)) < 1e-9 * good.sup_norm()
    assert np.max(np.abs(direct.values - swapped.values)) > 1e-3 * good.sup_norm()


def test_convolution_bandwidth_mismatch(t1_grid, rng):
    f = random_band_limited(t1_grid, 16.0, rng)
    g = random_band_limited(t1_grid, 20.0, rng)
    with pytest.raises(ValueError):
        convolve_fourier(f, g)


def test_young_inequality(su2_grid, rng):
    from oscint.multipliers import heat_symbol, synthesize_kernel

    L = su2_grid.max_bandwidth / 2
    k = synthesize_kernel(heat_symbol(SU2, 0.3), su2_grid, L, regularization="none").kernel
    f = inverse_transform(random_band_limited(su2_grid, L, rng), su2_grid)
    conv = convolve_direct(f, k, bandwidth=L)
    assert conv.l1_norm() <= f.l1_norm() * k.l1_norm() * (1 + 1e-6)


def test_nearest_mode_exact_on_torus(t1_grid, rng):
    L = 16.0
    f = inverse_transform(random_band_limited(t1_grid, L, rng), t1_grid)
    k = inverse_transform(random_band_limited(t1_grid, L, rng), t1_grid)
    a = convolve_direct(f, k, mode="nearest")
    b = convolve_direct(f, k, bandwidth=t1_grid.max_bandwidth)
    assert np.max(np.abs(a.values - b.values)) < 1e-9


def test_left_translate_coefficients(t1_grid, rng):
    khat = random_band_limited(t1_grid, 16.0, rng)
    k = inverse_transform(khat, t1_grid)
    y = TorusPoint((t1_grid.xs[5, 0],))  # grid-closed shift
    shifted = inverse_transform(left_translate_coefficients(khat, y), t1_grid)
    assert np.max(np.abs(shifted.values - np.roll(k.values, 5))) < 1e-10


def test_json_roundtrip(su2_grid, rng):
    khat = random_band_limited(su2_grid, 3.0, rng)
    again = coefficients_from_json(coefficients_to_json(khat))
    assert again.group == SU2
    assert set(again.entries) == set(khat.entries)
    for xi in khat.entries:
        assert np.max(np.abs(again.entries[xi] - khat.entries[xi])) < 1e-15


def test_forward_deterministic(t1_grid, rng):
    f = inverse_transform(random_band_limited(t1_grid, 16.0, rng), t1_grid)
    a = forward_transform(f, 16.0)
    b = forward_transform(f, 16.0)
    for xi in a.entries:
        assert np.array_equal(a.entries[xi], b.entries[xi])
