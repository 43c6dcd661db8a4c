import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import band, sin_mu
from symmlab.bv import FullSliceWarning, bv_decompose, cell_contributions, pairing, polar, sigma_measure, split_axis, total_variation
from symmlab.generators import disk, half_disk, random_polygon, wedge
from symmlab.grid import Box, GridFunction, GridSpec
from symmlab.perimeter import perimeter_F_mu_formula
from symmlab.slicing import distribution, xi_from_mu

PI = math.pi


def test_constant_has_no_derivative():
    g = GridSpec(((0.0, 1.0),), (50,))
    ac, jumps = bv_decompose(GridFunction(g, np.full(50, 3.0)))
    assert np.all(ac == 0) and jumps.n == 0


def test_wedge_xi_jumps():
    g = GridSpec(((0.5, 2.5),), (200,))
    xi = xi_from_mu(distribution(wedge(), g))
    ac, jumps = bv_decompose(xi)
    r = g.centers(0)
    assert np.abs(ac[(r > 1) & (r < 2), 0]).max() < 1e-12
    assert jumps.loc == pytest.approx([1.0, 2.0], abs=1e-12)
    assert jumps.magnitudes == pytest.approx([PI / 3, PI / 3], abs=1e-14)


def test_linear_function_is_smooth():
    g = GridSpec(((1.0, 2.0),), (100,))
    ac, jumps = bv_decompose(GridFunction(g, g.centers(0)))
    assert ac[:, 0] == pytest.approx(np.ones(100), abs=1e-12)
    assert jumps.n == 0


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=3, max_size=60))
def test_reconstruction_telescopes(vals):
    f = np.array(vals)
    h = 0.1
    sp = split_axis(f, h, 0)
    total = np.sum(sp.ac) * h - 0.5 * h * (sp.ac[0] + sp.ac[-1]) + np.sum(sp.mass[sp.jump])
    assert total == pytest.approx(f[-1] - f[0], abs=1e-9)


def test_non_finite_rejected():
    g = GridSpec(((0.0, 1.0),), (3,))
    with pytest.raises(ValueError):
        GridFunction(g, [0.0, np.nan, 1.0])


def test_sigma_wedge_assembly(wedge_mu):
    s = sigma_measure(wedge_mu)
    r = wedge_mu.grid.centers(0)
    inside = (r > 1) & (r < 2)
    assert s.ac[inside] == pytest.approx(np.tile([0.0, 2.0], (inside.sum(), 1)), abs=1e-11)
    assert np.all(s.ac[~inside, 1] == 0.0)
    assert s.jumps.loc == pytest.approx([1.0, 2.0], abs=1e-12)
    assert np.abs(s.weights[:, 0]) == pytest.approx([PI / 3, 2 * PI / 3], abs=1e-12)
    assert np.all(s.weights[:, 1] == 0)


def test_sigma_half_disk_assembly():
    g = GridSpec.aligned(band(0, 2), 400)
    s = sigma_measure(distribution(half_disk(), g))
    r = g.centers(0)
    assert s.ac[r < 1] == pytest.approx(np.tile([0.0, 2.0], ((r < 1).sum(), 1)), abs=1e-11)
    assert s.jumps.loc == pytest.approx([1.0])
    assert abs(s.weights[0, 0]) == pytest.approx(PI, abs=1e-12)


def test_sigma_of_zero():
    g = GridSpec(((1.0, 2.0),), (10,))
    s = sigma_measure(GridFunction(g, np.zeros(10)))
    assert total_variation(s, band(1, 2)) == 0.0


def test_total_variation_wedge(wedge_mu):
    s = sigma_measure(wedge_mu)
    assert total_variation(s, band(1, 2, "closed")) == pytest.approx(2 + PI, abs=1e-12)
    assert total_variation(s, band(1, 2, "open")) == pytest.approx(2.0, abs=1e-12)


def test_total_variation_outside_domain(wedge_mu):
    from symmlab.grid import RegionError

    with pytest.raises(RegionError):
        total_variation(sigma_measure(wedge_mu), band(0.0, 5.0))


def test_pairing_examples(wedge_mu):
    s = sigma_measure(wedge_mu)
    B = band(1, 2, "closed")
    assert pairing(s, polar(s), B) == pytest.approx(total_variation(s, B), rel=1e-14)
    assert pairing(s, [0.0, 1.0], band(1, 2, "open")) == pytest.approx(2.0, abs=1e-12)
    assert pairing(s, [0.0, 0.0], B) == 0.0


@settings(max_examples=40, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1), st.integers(0, 3))
def test_pairing_cauchy_schwarz(a, b, seed):
    mu = sin_mu(200)
    s = sigma_measure(mu)
    rng = np.random.default_rng(seed)
    phi_c = rng.uniform(-1, 1, s.ac.shape) * np.array([a, b])
    phi_j = rng.uniform(-1, 1, s.weights.shape)
    B = Box(((1.0, 2.0),))
    bound = np.sqrt(max(np.max(np.sum(phi_c**2, -1)), np.max(np.sum(phi_j**2, -1), initial=0)))
    assert abs(pairing(s, (phi_c, phi_j), B)) <= bound * total_variation(s, B) + 1e-12


def test_chain_rule_reconstruction():
    mu = sin_mu(10_000, pad=False)
    g = mu.grid
    r = g.centers(0)
    d_mu = split_axis(mu.values, g.spacing[0], 0).ac
    xi = mu.values / r
    d_xi = split_axis(xi, g.spacing[0], 0).ac
    # end cells use one-sided slopes, which are only first-order accurate
    assert d_mu[1:-1] == pytest.approx((r * d_xi + xi)[1:-1], abs=1e-8)


def test_additive_over_partitions(wedge_mu):
    s = sigma_measure(wedge_mu)
    whole = total_variation(s, Box(((1.0, 2.0),), ((True, True),)))
    parts = total_variation(s, Box(((1.0, 1.5),), ((True, False),))) + total_variation(
        s, Box(((1.5, 2.0),), ((True, True),))
    )
    assert parts == pytest.approx(whole, abs=1e-12)
    assert total_variation(s, band(1.2, 1.7)) <= whole


def test_full_slices_warn_and_literal_restores():
    g = GridSpec.aligned(band(0, 2), 200)
    mu = distribution(disk(), g)
    with pytest.warns(FullSliceWarning):
        excl = total_variation(sigma_measure(mu), band(0, 2))
    with pytest.warns(FullSliceWarning):
        lit = total_variation(sigma_measure(mu, literal=True), band(0, 2))
    assert excl == pytest.approx(2 * PI, abs=1e-12)  # only the jump at r = 1
    assert lit == pytest.approx(2 * PI + 2.0, abs=1e-12)  # literal Lebesgue slot on the full disk


@pytest.mark.parametrize("n", [100, 1000, 2000])
def test_total_variation_matches_formula_bitwise(n, wedge_mu):
    for mu in (sin_mu(n), wedge_mu):
        B = band(*mu.grid.domain[0], "closed") if mu is not wedge_mu else band(1, 2, "closed")
        assert total_variation(sigma_measure(mu), B) == perimeter_F_mu_formula(mu, B)


def test_total_variation_matches_formula_bitwise_3d():
    from symmlab.generators import twisted_band

    g = GridSpec.aligned(Box(((1.0, 2.0), (0.0, 1.0))), 60)
    mu = distribution(twisted_band(), g)
    B = Box(((1.0, 2.0), (0.0, 1.0)), ((True, True), (True, True)))
    assert total_variation(sigma_measure(mu), B) == perimeter_F_mu_formula(mu, B)


def test_steiner_signals():
    from symmlab.steiner import steiner_sigma

    g = GridSpec.aligned(Box(((0.0, 1.0),), ((True, True),)), 100, positive_axis0=False)
    x = g.centers(0)
    v = GridFunction(g, np.where((x > 0) & (x < 1), 1.0, 0.0), "steiner", "v")
    assert total_variation(steiner_sigma(v), Box(((0.0, 1.0),), ((True, True),))) == pytest.approx(4.0, abs=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 300), st.floats(0.0, 0.8), st.floats(0.9, 1.6))
def test_cell_contributions_sum_to_total(seed, lo, hi):
    mu = distribution(random_polygon(seed=seed), GridSpec(((0.0, 1.6),), (400,)))
    sigma = sigma_measure(mu)
    for closure in ("open", "closed", "halfopen"):
        B = Box(((lo, hi),)).with_closure(closure)
        per = cell_contributions(sigma, B)
        assert per.values.sum() == pytest.approx(total_variation(sigma, B), abs=1e-12)
        assert (per.values >= 0).all() and (per.values[~mu.grid.cell_mask(B)] == 0).all()
