"""Exact width profiles of polygon slices and the symmetral perimeter built on them."""

import math

import numpy as np
import pytest
from conftest import band
from hypothesis import given, settings
from hypothesis import strategies as st

from symmlab.bv import sigma_measure, total_variation
from symmlab.diagnostics import check_condition_b, verify_inequality
from symmlab.generators import (
    disk,
    half_disk,
    random_polygon,
    rotated_wedge,
    sheared_square,
    unit_square,
    wedge,
)
from symmlab.grid import Box, GridSpec
from symmlab.perimeter import polygon_symmetral_perimeter
from symmlab.polygon import PolygonSet, Ring
from symmlab.slicing import (
    circle_endpoints,
    circle_profile,
    distribution,
    line_profile,
    slice_circle,
    slice_vertical,
)

PI = math.pi


def test_circle_profile_unit_square():
    # width pi/2 - 2 arccos(1/r) beyond r = 1, so r xi'/2 = -1/sqrt(r^2 - 1)
    r = np.array([0.3, 0.9, 1.1, 1.2, 1.4])
    half, state, deg = circle_profile(unit_square(), r)
    assert not deg.any()
    assert list(state) == [1, 1, 1, 1, 1]
    assert half[:2] == pytest.approx([0.0, 0.0], abs=1e-15)
    assert half[2:] == pytest.approx(-1 / np.sqrt(r[2:] ** 2 - 1), rel=1e-12)


def test_circle_profile_states():
    _, state, _ = circle_profile(wedge(), [0.5, 1.5, 2.5])
    assert list(state) == [0, 1, 0]
    _, state, _ = circle_profile(disk(), [0.5, 1.5])
    assert list(state) == [2, 0]


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 500), st.floats(0.35, 1.4))
def test_circle_profile_matches_finite_difference(seed, r):
    P = random_polygon(seed=seed)
    half, state, deg = circle_profile(P, [r])
    h = 1e-6
    if deg[0] or state[0] != 1 or any(d for *_, d in circle_endpoints(P, [r - h, r + h])):
        return
    fd = (slice_circle(P, r + h).width - slice_circle(P, r - h).width) / (2 * h)
    assert half[0] == pytest.approx(0.5 * r * fd, abs=1e-5 * max(1.0, abs(fd)))


def test_line_profile():
    # sheared square: vertical extent 1 throughout; triangle below y = 1 - x: extent 1 - x
    slope, live, deg = line_profile(sheared_square(), [0.25, 0.75, 3.0])
    assert list(live) == [True, True, False] and not deg.any()
    assert slope[:2] == pytest.approx([0.0, 0.0], abs=1e-12)
    tri = PolygonSet((Ring(((0.0, 0.0), (1.0, 0.0), (0.0, 1.0))),))
    slope, live, _ = line_profile(tri, [0.2, 0.7])
    assert live.all() and slope == pytest.approx([-1.0, -1.0], abs=1e-12)
    fd = (slice_vertical(tri, 0.2 + 1e-6).measure - slice_vertical(tri, 0.2 - 1e-6).measure) / 2e-6
    assert fd == pytest.approx(-1.0, abs=1e-6)


@pytest.mark.parametrize(
    "P,lo,hi,expected",
    [
        (unit_square(), 0.0, 1.5, 4.0),
        (half_disk(), 0.0, 2.0, 2 + PI),
        (wedge(), 0.5, 2.5, 2 + PI),
        (rotated_wedge(), 0.5, 2.5, 2 + PI),
        (disk(), 0.0, 1.5, 2 * PI),
    ],
    ids=["unit_square", "half_disk", "wedge", "rotated_wedge", "disk"],
)
def test_symmetral_perimeter_exact(P, lo, hi, expected):
    q = polygon_symmetral_perimeter(P, Box(((lo, hi),)))
    assert q.refined == pytest.approx(expected, abs=1e-9)
    assert q.difference < 1e-9


def test_symmetral_perimeter_literal_matches_distributional():
    B = Box(((0.0, 1.5),))
    tv = total_variation(sigma_measure(_mu(disk(), B), literal=True), B)
    assert polygon_symmetral_perimeter(disk(), B, literal=True).refined == pytest.approx(tv, abs=1e-9)


def _mu(P, B, n=1500):
    return distribution(P, GridSpec(B.bounds, (n,)))


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 500))
def test_symmetral_perimeter_converges_to_grid_route(seed):
    # chords across kinks of the width profile only lose length, so the grid
    # route approaches the exact one from below; 16x refinement must gain at least 4x
    P = random_polygon(seed=seed)
    B = Box(((0.0, 1.05 * P.max_radius()),))
    exact = polygon_symmetral_perimeter(P, B).refined
    coarse, fine = (total_variation(sigma_measure(_mu(P, B, n)), B) - exact for n in (1000, 16000))
    assert coarse <= 1e-9 and fine <= 1e-9
    assert abs(fine) <= abs(coarse) / 4 + 1e-9


def test_unit_square_is_equality_case():
    rep = verify_inequality(unit_square(), Box(((0.0, 1.5),)))
    assert rep.condition_a.passed and rep.condition_b.passed
    assert rep.equality and rep.sound
    assert rep.routes["quadrature_symmetral"] == pytest.approx(4.0, abs=1e-9)


def test_condition_b_profiles():
    B = band(1, 2)
    mu = _mu(rotated_wedge(), Box(((0.0, 2.5),)), 1000)
    exact = check_condition_b(rotated_wedge(), mu, B, profile="exact")
    grid = check_condition_b(rotated_wedge(), mu, B, profile="grid")
    assert exact.passed and grid.passed
    with pytest.raises(ValueError):
        check_condition_b(rotated_wedge(), mu, B, profile="spline")
