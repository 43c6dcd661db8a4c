import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import band, sin_mu
from symmlab.arcfamily import ArcFamilySet, BuiltinField
from symmlab.diagnostics import (
    bar_nu_F,
    boundary_normals,
    check_condition_a,
    check_condition_b,
    exact_symmetral,
    verify_inequality,
    verify_symmetral_propositions,
)
from symmlab.generators import (
    disk,
    drifted_wedge,
    half_disk,
    random_polygon,
    rotated_wedge,
    split_wedge,
    twisted_band,
    wedge,
)
from symmlab.grid import Box, GridFunction, GridSpec
from symmlab.polygon import PolygonSet, Ring
from symmlab.slicing import distribution
from symmlab.symmetral import build_F_mu

PI = math.pi
DRIFT_RADIAL = 1.5 / math.sqrt(1 + 2.25)


def rotate_polygon(P: PolygonSet, phi: float) -> PolygonSet:
    c, s = math.cos(phi), math.sin(phi)
    rot = lambda p: (c * p[0] - s * p[1], s * p[0] + c * p[1])  # noqa: E731
    rings = []
    for ring in P.rings:
        arcs = None
        if ring.arcs is not None:
            arcs = tuple(None if a is None else (*rot(a[:2]), a[2]) for a in ring.arcs)
        rings.append(Ring(tuple(rot(v) for v in ring.vertices), ring.orientation, arcs))
    return PolygonSet(tuple(rings))


# -- profile normal ---------------------------------------------------------


def test_bar_nu_constant_width():
    n = bar_nu_F(exact_symmetral(drifted_wedge()), 1.5)
    assert (n.radial, n.tangential) == pytest.approx((0.0, 1.0), abs=1e-15)
    mu = distribution(half_disk(), GridSpec.aligned(band(0, 1), 400))
    n = bar_nu_F(mu, 0.5)
    assert (n.radial, n.tangential) == pytest.approx((0.0, 1.0), abs=1e-9)


def test_bar_nu_vertical_gradient():
    # xi = 1 + z so that d_z mu = r; at r = 1.5 the direction is (0, 1, 0.75)
    A = ArcFamilySet(((1.0, 2.0), (0.0, 1.0)), BuiltinField("affine", c0=1.0, cz=1.0))
    n = bar_nu_F(A, 1.5, 0.5)
    assert n.radial == pytest.approx(0.0, abs=1e-15)
    assert n.tangential == pytest.approx(0.8, abs=1e-14)
    assert n.vertical[0] == pytest.approx(0.6, abs=1e-14)


def test_bar_nu_vertical_gradient_from_grid():
    g = GridSpec(((1.0, 2.0), (0.0, 1.0)), (100, 100))
    r, z = g.mesh()
    n = bar_nu_F(GridFunction(g, r * (1.0 + z)), 1.505, 0.505)
    t = 1 / math.hypot(1.0, 0.5 * 1.505)
    assert n.tangential == pytest.approx(t, abs=1e-9)
    assert n.vertical[0] == pytest.approx(0.5 * 1.505 * t, abs=1e-9)


def test_bar_nu_empty_and_full():
    assert bar_nu_F(exact_symmetral(drifted_wedge()), 2.5) is None
    mu = distribution(disk(), GridSpec.aligned(band(0, 1), 100))
    assert bar_nu_F(mu, 0.5) is None


# -- boundary normals -------------------------------------------------------


def test_boundary_normals_wedge():
    bn = boundary_normals(wedge(), 1.5)
    assert len(bn.circ) == 2
    for c in bn.circ:
        assert (c.radial, c.tangential) == pytest.approx((0.0, 1.0), abs=1e-12)


def test_boundary_normals_drifted():
    bn = boundary_normals(drifted_wedge(), 1.5)
    radial = sorted(c.radial for c in bn.circ)
    assert radial == pytest.approx([-DRIFT_RADIAL, DRIFT_RADIAL], abs=1e-12)
    assert [c.tangential for c in bn.circ] == pytest.approx([math.sqrt(1 - DRIFT_RADIAL**2)] * 2, abs=1e-12)


def test_boundary_normals_are_unit_and_inward():
    P = random_polygon(seed=3)
    for r in (0.4, 0.9, 1.2):
        bn = boundary_normals(P, r)
        for p, nu in zip(bn.points, bn.normals):
            assert np.linalg.norm(nu) == pytest.approx(1.0, abs=1e-12)
            assert P.contains(p + 1e-6 * nu)[0] and not P.contains(p - 1e-6 * nu)[0]


def test_boundary_normals_full_slice():
    bn = boundary_normals(disk(), 0.5)
    assert len(bn.points) == 0 and bn.circ == []


# -- condition a ------------------------------------------------------------


def test_condition_a_examples():
    B = band(1, 2)
    a = check_condition_a(wedge(), B)
    assert a.passed and a.violating_measure == 0.0
    a = check_condition_a(split_wedge(), B)
    assert not a.passed and a.violating_measure == pytest.approx(B.volume, abs=1e-12)
    assert check_condition_a(half_disk(), band(0, 2)).passed


def test_condition_a_partial():
    # two arcs only on (1, 1.5): the bands overlap in radius on that range
    outer = wedge(PI / 6, 1.0, 2.0)
    inner = rotate_polygon(wedge(PI / 6, 1.0, 1.5), PI)
    P = PolygonSet(outer.rings + inner.rings)
    a = check_condition_a(P, band(1, 2))
    assert a.violating_measure == pytest.approx(0.5, abs=1e-12)
    assert a.fraction == pytest.approx(0.5, abs=1e-12)


# -- condition b ------------------------------------------------------------


def test_condition_b_rotated_wedge():
    B = band(1, 2)
    mu = distribution(rotated_wedge(), GridSpec.aligned(B, 1000))
    b = check_condition_b(rotated_wedge(), mu, B)
    assert b.passed and b.max_deviation < 1e-9 and b.n_checked == 1000


def test_condition_b_drifted():
    A = drifted_wedge()
    b = check_condition_b(A, exact_symmetral(A), band(1, 2))
    assert not b.passed
    assert b.n_violating == b.n_checked
    # deviation at r: the radial part c r / sqrt(1 + c^2 r^2) against 0, plus the tangential shortfall
    g = GridSpec.aligned(band(1, 2), 1000, pad=0)
    r = g.centers(0)
    q = r / np.sqrt(1 + r * r)
    expected = np.hypot(q, 1 - np.sqrt(1 - q * q)).max()
    assert b.max_deviation == pytest.approx(expected, abs=1e-12)
    first = b.violating_slices[0]
    assert first["slice"][0] == pytest.approx(r[0], abs=1e-15)
    assert first["deviation"] == pytest.approx(np.hypot(q[0], 1 - np.sqrt(1 - q[0] ** 2)), abs=1e-12)


def test_condition_b_twisted():
    A = twisted_band()
    b = check_condition_b(A, exact_symmetral(A), Box(((1.0, 2.0), (0.0, 1.0))))
    assert not b.passed and b.max_deviation > 0.5


def test_condition_b_symmetral_itself():
    mu = sin_mu(1000)
    F = build_F_mu(mu)
    b = check_condition_b(F, mu, band(1, 2))
    assert b.passed and b.max_deviation < 1e-12


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 200), st.floats(0.0, 2 * PI))
def test_condition_b_rotation_invariant(seed, phi):
    P = random_polygon(seed=seed)
    B = band(0, 1.6)
    g = GridSpec(((0.0, 1.6),), (160,))
    mu = distribution(P, g)
    b0 = check_condition_b(P, mu, B)
    b1 = check_condition_b(rotate_polygon(P, phi), mu, B)
    assert b1.max_deviation == pytest.approx(b0.max_deviation, abs=1e-9)
    assert b1.n_checked == b0.n_checked


# -- verify_inequality -----------------------------------------------------


def test_verify_half_disk():
    rep = verify_inequality(half_disk(), band(0, 2))
    assert abs(rep.gap) < 1e-9
    assert rep.condition_a.passed and rep.condition_b.passed and rep.equality and rep.sound


def test_verify_drifted():
    rep = verify_inequality(drifted_wedge(), Box(((1.0, 2.0),)))
    assert rep.gap == pytest.approx(1.62019, abs=1e-4)
    assert rep.condition_a.passed and not rep.condition_b.passed
    assert not rep.equality and rep.sound


def test_verify_split():
    rep = verify_inequality(split_wedge(), Box(((1.0, 2.0),)))
    assert rep.gap == pytest.approx(2.0, abs=1e-6)
    assert not rep.condition_a.passed and not rep.equality and rep.sound


def test_report_json_keys():
    d = verify_inequality(wedge(), Box(((1.0, 2.0),))).to_json()
    for key in ("p_set", "p_symmetral", "gap", "condition_a", "condition_b", "excised", "tolerance", "metadata"):
        assert key in d
    assert d["condition_b"]["pass"] is True


def test_restriction_to_boundary_slices():
    # outside [1, 2] the wedge slices are empty, so the perimeters live over [1, 2]
    wide = verify_inequality(wedge(), band(0, 3))
    tight = verify_inequality(wedge(), band(1, 2, "closed"))
    assert wide.p_set == pytest.approx(tight.p_set, abs=1e-12)
    assert wide.p_symmetral == pytest.approx(tight.p_symmetral, abs=1e-6)


# -- propositions -----------------------------------------------------------


@pytest.mark.parametrize(
    "mu",
    [
        distribution(wedge(), GridSpec.aligned(band(1, 2), 1000)),
        distribution(half_disk(), GridSpec.aligned(band(0, 1), 1000)),
        sin_mu(2000),
    ],
    ids=["wedge", "half_disk", "sin"],
)
def test_symmetral_propositions(mu):
    rep = verify_symmetral_propositions(mu, Box(((0.0, 2.5),)), 1000)
    assert rep.n_checked == 1000
    assert rep.passed, rep.to_json()


def test_propositions_exercise_walls():
    rep = verify_symmetral_propositions(distribution(wedge(), GridSpec.aligned(band(1, 2), 200)), Box(((0.0, 3.0),)))
    assert rep.n_wall_points > 0 and rep.rotation <= 1e-12


def test_propositions_seeded():
    mu = sin_mu(500)
    a = verify_symmetral_propositions(mu, Box(((1.0, 2.0),)), 200, seed=5)
    b = verify_symmetral_propositions(mu, Box(((1.0, 2.0),)), 200, seed=5)
    assert a == b
