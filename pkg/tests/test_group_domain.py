"""Group operations, geodesic distance, grids, and ball volumes."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oscint.groups import (
    SU2,
    Su2Point,
    TorusPoint,
    compose,
    distance,
    geodesic_norm,
    identity,
    invert,
    torus,
    diameter,
)
from oscint.group_domain import Ball, ball_volume, build_grid, grid_to_csv, points_in_ball
from tests.conftest import random_unit_quaternions

unit = st.floats(min_value=0.0, max_value=1.0, exclude_max=True)


@given(unit, unit)
@settings(max_examples=50, deadline=None)
def test_torus_compose_mod_one(a, b):
    z = compose(TorusPoint((a,)), TorusPoint((b,)))
    assert abs(z.coords[0] - ((a + b) % 1.0)) < 1e-12


def test_compose_examples():
    z = compose(TorusPoint((0.7,)), TorusPoint((0.6,)))
    assert abs(z.coords[0] - 0.3) < 1e-12
    x = TorusPoint((0.123, 0.456))
    assert compose(x, identity(torus(2))) == x


def test_group_axioms_su2(rng):
    e = identity(SU2)
    for q in random_unit_quaternions(rng, 25):
        x = Su2Point(tuple(q))
        xi = invert(x)
        assert np.allclose(np.array(xi.quat), np.array([q[0], -q[1], -q[2], -q[3]]), atol=1e-12)
        prod = compose(x, xi)
        assert np.allclose(np.array(prod.quat), np.array(e.quat), atol=1e-12) or np.allclose(
            np.array(prod.quat), -np.array(e.quat), atol=1e-12
        )
        assert distance(prod, e) < 1e-12 or abs(distance(prod, e) - 2 * math.pi) < 1e-6


def test_geodesic_examples():
    assert abs(geodesic_norm(TorusPoint((0.75,))) - 0.25) < 1e-12
    # diag(i, -i) is the quaternion (0, 1, 0, 0): trace zero, norm pi
    assert abs(geodesic_norm(Su2Point((0.0, 1.0, 0.0, 0.0))) - math.pi) < 1e-12
    assert geodesic_norm(identity(SU2)) == 0.0
    assert geodesic_norm(identity(torus(3))) == 0.0


def test_norm_symmetric_under_inverse(rng):
    for q in random_unit_quaternions(rng, 20):
        x = Su2Point(tuple(q))
        assert abs(geodesic_norm(x) - geodesic_norm(invert(x))) < 1e-12
    for c in rng.uniform(size=(20, 2)):
        x = TorusPoint(tuple(c))
        assert abs(geodesic_norm(x) - geodesic_norm(invert(x))) < 1e-12


def test_bi_invariance_thousand_triples(rng):
    count = 0
    for q in random_unit_quaternions(rng, 3 * 250).reshape(250, 3, 4):
        x, y, z = (Su2Point(tuple(v)) for v in q)
        d0 = distance(x, y)
        assert abs(distance(compose(z, x), compose(z, y)) - d0) < 1e-10
        assert abs(distance(compose(x, z), compose(y, z)) - d0) < 1e-10
        count += 1
    for c in rng.uniform(size=(750, 3, 2)):
        x, y, z = (TorusPoint(tuple(v)) for v in c)
        d0 = distance(x, y)
        assert abs(distance(compose(z, x), compose(z, y)) - d0) < 1e-10
        assert abs(distance(compose(x, z), compose(y, z)) - d0) < 1e-10
        count += 1
    assert count == 1000


def test_triangle_inequality(rng):
    for q in random_unit_quaternions(rng, 3 * 200).reshape(200, 3, 4):
        x, y, z = (Su2Point(tuple(v)) for v in q)
        assert distance(x, z) <= distance(x, y) + distance(y, z) + 1e-10
    for c in rng.uniform(size=(200, 3, 3)):
        x, y, z = (TorusPoint(tuple(v)) for v in c)
        assert distance(x, z) <= distance(x, y) + distance(y, z) + 1e-10


def test_build_grid_examples():
    g = build_grid(torus(1), 4)
    assert g.size == 8
    assert np.allclose(g.weights, 1 / 8)
    assert abs(g.weights.sum() - 1.0) < 1e-12

    gq = build_grid(SU2, 4)
    assert gq.size == 8 * 4 * 8
    assert abs(gq.weights.sum() - 1.0) < 1e-12
    assert np.all(gq.weights > 0)


def test_build_grid_rejects_tiny_order():
    with pytest.raises(ValueError):
        build_grid(torus(1), 1)


def test_ball_volume_examples():
    assert abs(ball_volume(torus(1), 0.25) - 0.5) < 1e-15
    assert abs(ball_volume(SU2, 2 * math.pi) - 1.0) < 1e-15
    assert abs(ball_volume(SU2, math.pi) - 0.5) < 1e-15
    with pytest.raises(ValueError):
        ball_volume(torus(1), 0.0)


def test_su2_ball_volume_against_monte_carlo(rng):
    # Haar sampling oracle before trusting the closed form
    q = random_unit_quaternions(rng, 200_000)
    norms = 2 * np.arccos(np.clip(q[:, 0], -1, 1))
    for r in [0.5, math.pi / 2, math.pi, 4.0]:
        mc = float(np.mean(norms <= r))
        assert abs(ball_volume(SU2, r) - mc) < 1e-3 + 3.5 * math.sqrt(mc * (1 - mc) / len(q))


def test_torus_wrapped_volume_against_monte_carlo(rng):
    for n in (2, 3):
        pts = rng.uniform(size=(400_000, n))
        d = np.minimum(pts, 1 - pts)
        norms = np.sqrt((d**2).sum(axis=1))
        for r in [0.3, 0.55, 0.7]:
            if r > diameter(torus(n)):
                continue
            mc = float(np.mean(norms <= r))
            assert abs(ball_volume(torus(n), r) - mc) < 2e-3


def test_ball_volume_monotone_and_full():
    for group in [torus(1), torus(2), torus(3), SU2]:
        rs = np.linspace(1e-3, diameter(group), 60)
        vols = [ball_volume(group, r) for r in rs]
        assert all(b >= a - 1e-12 for a, b in zip(vols, vols[1:]))
        assert abs(ball_volume(group, diameter(group)) - 1.0) < 1e-8


def test_doubling_at_small_radii():
    for group in [torus(1), torus(2), torus(3), SU2]:
        n = group.dimension
        for r in np.linspace(1e-3, diameter(group) / 8, 25):
            ratio = ball_volume(group, 2 * r) / ball_volume(group, r)
            assert ratio <= 2 ** (n + 1) + 1e-9


def test_quadrature_exactness_torus():
    g = build_grid(torus(2), 4)
    # all frequencies with per-axis order <= 3 integrate exactly in pairs
    for l1 in [(0, 0), (1, -2), (3, 3)]:
        for l2 in [(0, 0), (2, 1), (-3, 3)]:
            phases = np.exp(2j * np.pi * (g.xs @ (np.array(l1) - np.array(l2))))
            integral = np.sum(g.weights * phases)
            expect = 1.0 if l1 == l2 else 0.0
            assert abs(integral - expect) < 1e-10


def test_ball_membership_and_csv(t1_grid):
    ball = Ball(identity(torus(1)), 0.1)
    mask = points_in_ball(t1_grid, ball)
    assert np.count_nonzero(mask) == 2 * int(0.1 * 2 * t1_grid.order) + 1
    with pytest.raises(ValueError):
        Ball(identity(torus(1)), 2.0)  # beyond diameter
    text = grid_to_csv(t1_grid)
    lines = text.strip().split("\n")
    assert lines[0] == "x0,weight"
    assert len(lines) == t1_grid.size + 1
