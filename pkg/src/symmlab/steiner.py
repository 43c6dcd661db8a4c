"""Steiner symmetrisation of planar sets about the line ``{y = 0}``.

Slices are vertical, the distribution is ``v(x') = |E_{x'}|`` and the
symmetral is ``F[v] = {|y| < v(x')/2}``.  The Steiner normal keeps the
horizontal components and takes the modulus of the vertical one.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .bv import DEFAULT_THRESHOLD, SigmaMeasure, sigma_measure, split_axis, total_variation
from .diagnostics import (
    EXACT_TOL,
    ConditionA,
    ConditionB,
    DiagnosticsReport,
    _finish_b,
    _sample_grid,
)
from .grid import Box, GridFunction, GridSpec, SliceGrid
from .perimeter import polygon_perimeter
from .polygon import PolygonSet
from .slicing import distribution, line_endpoints, slice_vertical


def steiner_sigma(v: GridFunction, threshold=DEFAULT_THRESHOLD) -> SigmaMeasure:
    """``sigma_v`` with slots ``(grad v, 2 chi_{v > 0})``."""
    if v.mode != "steiner":
        raise ValueError("steiner_sigma needs a steiner distribution")
    if np.any(v.values < 0):
        raise ValueError("v must be non-negative")
    return sigma_measure(v, "steiner", threshold)


def steiner_nu_s(nu) -> np.ndarray:
    """Replace the last component of a unit normal by its modulus."""
    nu = np.array(nu, dtype=float)
    if abs(float(nu @ nu) - 1.0) > 1e-10:
        raise ValueError("normal must be a unit vector")
    nu[-1] = abs(nu[-1])
    return nu


def bar_nu_s_field(v: GridFunction, threshold=DEFAULT_THRESHOLD):
    """Per-cell unit direction of ``(grad v, 2)`` on ``{v > 0}``, and that mask."""
    g = v.grid
    comps = [split_axis(v.values, g.spacing[ax], ax, threshold) for ax in range(g.dim)]
    vec = np.stack([c.ac for c in comps] + [np.full(g.shape, 2.0)], axis=-1)
    vec /= np.linalg.norm(vec, axis=-1, keepdims=True)
    live = v.values > 0
    return np.where(live[..., None], vec, 0.0), live


def F_v_normals(v: GridFunction, threshold=DEFAULT_THRESHOLD):
    """Inner normals of ``F[v]`` at ``y = +v/2`` and ``y = -v/2`` per cell."""
    g = v.grid
    grads = [split_axis(v.values, g.spacing[ax], ax, threshold).ac for ax in range(g.dim)]
    up = np.stack([0.5 * gr for gr in grads] + [-np.ones(g.shape)], axis=-1)
    down = np.stack([0.5 * gr for gr in grads] + [np.ones(g.shape)], axis=-1)
    up /= np.linalg.norm(up, axis=-1, keepdims=True)
    down /= np.linalg.norm(down, axis=-1, keepdims=True)
    return up, down


def check_condition_a_steiner(source, region: Box, tol: float = EXACT_TOL) -> ConditionA:
    """Measure of ``x'`` in ``region`` whose vertical slice has two or more intervals."""
    size = region.volume
    if isinstance(source, SliceGrid):
        mask = source.grid.cell_mask(region)
        counts = np.vectorize(lambda s: s.n_components, otypes=[int])(source.cells)
        bad = float(np.sum((counts >= 2) & mask)) * source.grid.cell_volume
        return ConditionA(bad <= tol * size, bad, bad / size, size, tol)
    lo, hi = region.bounds[0]
    xlo, xhi = source.x_range()
    lo, hi = max(lo, xlo), min(hi, xhi)
    bad = 0.0
    if hi > lo:
        et = source.edges
        cuts = {lo, hi}
        for i in range(et.m):
            cuts.add(float(et.a[i, 0]))
            for t in et.monotone_params(i, "x"):
                cuts.add(float(et.point(i, t)[0]))
        cuts = sorted(c for c in cuts if lo <= c <= hi)
        for a, b in zip(cuts[:-1], cuts[1:]):
            if slice_vertical(source, 0.5 * (a + b)).n_components >= 2:
                bad += b - a
    return ConditionA(bad <= tol * size, bad, bad / size, size, tol)


def check_condition_b_steiner(
    P: PolygonSet, v: GridFunction, region: Box, tol: float = EXACT_TOL, budget: float = 0.0
) -> ConditionB:
    """Largest ``|nu_s - bar_nu_s|`` over slice-boundary points at the cell centres in ``region``."""
    bar, live = bar_nu_s_field(v)
    pts, cell = _sample_grid(v.grid, region)
    mask = v.grid.cell_mask(region)
    bar, live = bar[mask], live[mask]
    xs = pts[0]
    et = P.edges
    n = len(xs)
    devs = np.zeros(n)
    checked = np.zeros(n, dtype=bool)
    degenerate = np.zeros(n, dtype=bool)
    for idx, (ys, edges, ts, deg) in enumerate(line_endpoints(P, xs)):
        if len(ys) == 0 or not live[idx]:
            continue
        if deg:
            degenerate[idx] = True
            continue
        nus = np.array([et.inner_normal(int(i), float(t)) for i, t in zip(edges, ts)])
        nus[:, -1] = np.abs(nus[:, -1])
        devs[idx] = float(np.linalg.norm(nus - bar[idx], axis=1).max())
        checked[idx] = True
    sel = checked | degenerate
    coords = [(float(xs[i]),) for i in np.nonzero(sel)[0]]
    return _finish_b(devs[sel], coords, degenerate[sel], cell, tol, budget)


def steiner_grid(P: PolygonSet, region: Box, n: int = 1000) -> GridSpec:
    """Grid with ``n`` cells over ``region`` whose interfaces hit the x-coordinates of vertical edges."""
    return GridSpec.aligned(region, n, positive_axis0=False, features=[P.jump_coordinates("x")])


def steiner_verify(
    P: PolygonSet,
    region: Box,
    n: int = 1000,
    tol: Optional[float] = None,
    threshold: float = DEFAULT_THRESHOLD,
) -> DiagnosticsReport:
    """Compare the perimeter of ``P`` over the strip ``region × R`` with that of ``F[v]``."""
    if not isinstance(P, PolygonSet):
        raise TypeError("steiner verification works on planar polygon sets")
    grid = steiner_grid(P, region, n)
    h = grid.spacing[0]
    v = distribution(P, grid, "steiner")
    tv = total_variation(steiner_sigma(v, threshold), region)
    fine = distribution(P, grid.refine(2), "steiner")
    tv_fine = total_variation(steiner_sigma(fine, threshold), region)
    p_set = polygon_perimeter(P, region, "steiner")
    tols = {
        "b": EXACT_TOL if tol is None else tol,
        "gap": max(EXACT_TOL, 4 * abs(tv_fine - tv)),
        "inequality": 10 * h,
    }
    ca = check_condition_a_steiner(P, region)
    cb = check_condition_b_steiner(P, v, region, tols["b"], 0.0)
    routes = {"total_variation": tv, "total_variation_refined": tv_fine}
    meta = {"grid": grid.to_json(), "threshold": threshold, "source": "polygon"}
    return DiagnosticsReport("steiner", region.format(("x",)), p_set, tv, p_set - tv, ca, cb, tols, routes, meta)


def verify_F_v_propositions(v: GridFunction, threshold=DEFAULT_THRESHOLD) -> dict:
    """Endpoint normals of ``F[v]``: equal Steiner normals and mirror symmetry across ``y = 0``."""
    up, down = F_v_normals(v, threshold)
    live = v.values > 0
    su, sd = up.copy(), down.copy()
    su[..., -1] = np.abs(su[..., -1])
    sd[..., -1] = np.abs(sd[..., -1])
    const = float(np.where(live, np.linalg.norm(su - sd, axis=-1), 0.0).max(initial=0.0))
    mirror = up.copy()
    mirror[..., -1] = -mirror[..., -1]
    refl = float(np.where(live, np.linalg.norm(mirror - down, axis=-1), 0.0).max(initial=0.0))
    bar, _ = bar_nu_s_field(v, threshold)
    prof = float(np.where(live, np.linalg.norm(su - bar, axis=-1), 0.0).max(initial=0.0))
    return {"constancy": const, "reflection": refl, "profile": prof, "pass": max(const, refl, prof) <= 1e-12}
