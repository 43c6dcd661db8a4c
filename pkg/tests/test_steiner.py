import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symmlab.bv import total_variation
from symmlab.generators import random_polygon, sheared_square, stacked_squares, unit_square
from symmlab.grid import Box, GridFunction, GridSpec
from symmlab.slicing import distribution
from symmlab.steiner import (
    F_v_normals,
    check_condition_a_steiner,
    steiner_nu_s,
    steiner_sigma,
    steiner_verify,
    verify_F_v_propositions,
)

STRIP = Box(((-1.0, 2.0),))


def v_on(values_fn, lo=-0.5, hi=1.5, n=2000):
    g = GridSpec(((lo, hi),), (n,))
    x = g.centers(0)
    return GridFunction(g, np.where((x > 0) & (x < 1), values_fn(x), 0.0), "steiner", "v")


def test_sigma_constant_one():
    v = v_on(np.ones_like)
    assert total_variation(steiner_sigma(v), Box(((0.0, 1.0),)).with_closure("closed")) == pytest.approx(4.0, abs=1e-12)


def test_sigma_zero():
    assert total_variation(steiner_sigma(v_on(np.zeros_like)), Box(((-0.5, 1.5),))) == 0.0


def test_sigma_linear():
    # ac part over the open interval: integral of |(1, 2)| = sqrt 5, up to the O(h) kink at the ends
    v = v_on(lambda x: x)
    h = v.grid.spacing[0]
    tv = total_variation(steiner_sigma(v), Box(((0.0, 1.0),)).with_closure("open"))
    assert tv == pytest.approx(math.sqrt(5), abs=10 * h)
    g = GridSpec(((0.0, 1.0),), (1000,))
    exact = GridFunction(g, g.centers(0), "steiner", "v")
    assert total_variation(steiner_sigma(exact), Box(((0.0, 1.0),))) == pytest.approx(math.sqrt(5), abs=1e-12)


def test_sigma_rejects():
    g = GridSpec(((0.0, 1.0),), (10,))
    with pytest.raises(ValueError):
        steiner_sigma(GridFunction(g, -np.ones(10), "steiner", "v"))
    with pytest.raises(ValueError):
        steiner_sigma(GridFunction(g, np.ones(10)))


@pytest.mark.parametrize(
    "nu,expected", [((0.0, 1.0), (0.0, 1.0)), ((0.0, -1.0), (0.0, 1.0)), ((0.6, -0.8), (0.6, 0.8))]
)
def test_nu_s(nu, expected):
    assert tuple(steiner_nu_s(nu)) == expected


def test_nu_s_needs_unit():
    with pytest.raises(ValueError):
        steiner_nu_s((1.0, 1.0))


def test_verify_unit_square():
    rep = steiner_verify(unit_square(), STRIP)
    assert rep.p_set == pytest.approx(4.0, abs=1e-12)
    assert rep.gap == pytest.approx(0.0, abs=1e-12)
    assert rep.condition_a.passed and rep.condition_b.passed and rep.equality and rep.sound


def test_verify_sheared_square():
    rep = steiner_verify(sheared_square(), STRIP)
    assert rep.p_set == pytest.approx(2 + 2 * math.sqrt(2), abs=1e-12)
    assert rep.p_symmetral == pytest.approx(4.0, abs=1e-12)
    assert rep.gap == pytest.approx(2 * math.sqrt(2) - 2, abs=1e-6)
    assert rep.condition_a.passed and not rep.condition_b.passed
    # slanted sides: nu_s = (-+1, 1)/sqrt 2 against (0, 1)
    assert rep.condition_b.max_deviation == pytest.approx(math.hypot(1 / math.sqrt(2), 1 - 1 / math.sqrt(2)), abs=1e-12)
    assert not rep.equality and rep.sound


def test_verify_stacked_squares():
    rep = steiner_verify(stacked_squares(), STRIP)
    assert rep.gap == pytest.approx(2.0, abs=1e-6)
    assert not rep.condition_a.passed and not rep.equality and rep.sound


def test_condition_a_partial_overlap():
    a = check_condition_a_steiner(stacked_squares(), Box(((0.5, 3.0),)))
    assert a.violating_measure == pytest.approx(0.5, abs=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 500))
def test_steiner_inequality_random(seed):
    P = random_polygon(seed=seed)
    lo, hi = P.x_range()
    rep = steiner_verify(P, Box(((lo - 0.1, hi + 0.1),)), 400)
    assert rep.gap >= -rep.tolerance["inequality"]
    assert rep.sound, rep.breaches()


def test_F_v_propositions():
    for v in (v_on(np.ones_like), v_on(lambda x: x * (1 - x)), distribution(sheared_square(), GridSpec(STRIP.bounds, (300,)), "steiner")):
        rep = verify_F_v_propositions(v)
        assert rep["pass"], rep


def test_F_v_normals_unit():
    up, down = F_v_normals(v_on(lambda x: 1 + x))
    assert np.allclose(np.linalg.norm(up, axis=-1), 1.0) and np.allclose(np.linalg.norm(down, axis=-1), 1.0)
    assert np.all(up[..., -1] < 0) and np.all(down[..., -1] > 0)
