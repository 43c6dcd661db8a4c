"""Equality-case diagnostics for circular symmetrisation.

Condition (a) asks that slices be single arcs; condition (b) that the
circularised normal of the set agree, on every slice, with the profile
``bar_nu`` of the symmetral, the unit direction of ``(r d_r xi, 2, d_z mu)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .arcfamily import ArcFamilySet, BuiltinField
from .bv import DEFAULT_THRESHOLD, sigma_measure, total_variation
from .grid import Box, GridFunction, GridSpec, SliceGrid
from .perimeter import (
    DEFAULT_NQ,
    arcfamily_perimeter,
    perimeter_F_mu_formula,
    polygon_perimeter,
    polygon_symmetral_perimeter,
)
from .polygon import PolygonSet
from .sets import TWO_PI, CircNormal, normal_to_circ
from .slicing import _circle_endpoints_flat, circle_endpoints, circle_profile, distribution, slice_circle
from .symmetral import build_F_mu

EXACT_TOL = 1e-6
GRID_BUDGET = 0.01
MAX_LISTED = 50


def _plain(obj):
    """JSON-ready copy with numpy scalars turned into Python floats."""
    return json.loads(json.dumps(obj, default=lambda o: o.item() if isinstance(o, np.generic) else o.tolist()))


class InvariantBreach(RuntimeError):
    """A report violates its own consistency invariants."""


# ---------------------------------------------------------------------------
# normals


def _as_symmetral(sym) -> ArcFamilySet:
    if isinstance(sym, GridFunction):
        return build_F_mu(sym)
    if isinstance(sym, ArcFamilySet):
        return sym
    raise TypeError(f"expected a distribution or an arc family, got {type(sym).__name__}")


def exact_symmetral(A: ArcFamilySet) -> ArcFamilySet:
    """The circular symmetral of an arc family: same widths, centres moved to angle 0."""
    return ArcFamilySet(A.domain, A.xi, BuiltinField("constant", value=0.0), A.lipschitz_bound)


def bar_nu_field(F: ArcFamilySet, r, z=None):
    """Vectorised profile of the symmetral: ``(radial, tangential[, vertical])`` rows and a mask
    of slices with a boundary (neither empty nor full)."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    zz = None if F.k == 2 else np.broadcast_to(np.asarray(z, dtype=float), r.shape)
    xi = F.xi_at(r, zz)
    xr, xz = F.xi.grad(r, zz)
    live = (xi > 0) & (xi < TWO_PI)
    comps = [0.5 * r * xr, np.ones_like(r)]
    if F.k == 3:
        comps.append(0.5 * r * xz)  # d_z mu = r d_z xi
    v = np.stack(comps, axis=-1)
    v = v / np.linalg.norm(v, axis=-1, keepdims=True)
    return np.where(live[:, None], v, 0.0), live


def bar_nu_F(sym, r: float, z: Optional[float] = None) -> Optional[CircNormal]:
    """Common circularised normal on the boundary of the symmetral slice at ``(r, z)``,
    or ``None`` when that slice is empty or full."""
    F = _as_symmetral(sym)
    v, live = bar_nu_field(F, [r], None if z is None else [z])
    if not live[0]:
        return None
    return CircNormal(float(v[0, 0]), float(v[0, 1]), tuple(float(t) for t in v[0, 2:]))


@dataclass(frozen=True)
class BoundaryNormals:
    points: np.ndarray  # (n, k)
    normals: np.ndarray  # (n, k), inner unit normals
    circ: list  # CircNormal per point
    excluded: int = 0  # points at vertices or tangencies


def _graph_normals(A: ArcFamilySet, r, z=None):
    """Inner normals at the upper (theta_c + xi/2) and lower lateral graph points.

    Returns ``(theta_plus, nu_plus, theta_minus, nu_minus, live)`` with
    normals in Cartesian coordinates.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    zz = None if A.k == 2 else np.broadcast_to(np.asarray(z, dtype=float), r.shape)
    xi = A.xi_at(r, zz)
    c = A.center_at(r, zz)
    xr, xz = A.xi.grad(r, zz)
    cr, cz = A.theta_c.grad(r, zz)
    live = (xi > 0) & (xi < TWO_PI)
    out = []
    for s in (1.0, -1.0):
        th = c + 0.5 * s * xi
        tr, tz = cr + 0.5 * s * xr, cz + 0.5 * s * xz
        # inner normal ∝ s (r d_r theta) r_hat - s theta_hat + s (r d_z theta) z_hat
        a_r, a_t, a_z = s * r * tr, -s * np.ones_like(r), s * r * tz
        ct, st = np.cos(th), np.sin(th)
        comps = [a_r * ct - a_t * st, a_r * st + a_t * ct]
        if A.k == 3:
            comps.append(a_z)
        nu = np.stack(comps, axis=-1)
        nu /= np.linalg.norm(nu, axis=-1, keepdims=True)
        out += [th, nu]
    return out[0], out[1], out[2], out[3], live


def boundary_normals(source, r: float, z: Optional[float] = None) -> BoundaryNormals:
    """Points of the slice boundary at ``(r, z)`` with their inner normals."""
    if isinstance(source, ArcFamilySet):
        tp, nup, tm, num, live = _graph_normals(source, [r], None if z is None else [z])
        if not live[0]:
            return BoundaryNormals(np.zeros((0, source.k)), np.zeros((0, source.k)), [])
        pts, nus = [], []
        for th, nu in ((tp[0], nup[0]), (tm[0], num[0])):
            p = [r * math.cos(th), r * math.sin(th)] + ([z] if source.k == 3 else [])
            pts.append(p)
            nus.append(nu)
        pts, nus = np.array(pts), np.array(nus)
        return BoundaryNormals(pts, nus, [normal_to_circ(n, p) for n, p in zip(nus, pts)])
    if isinstance(source, PolygonSet):
        ang, edges, ts, degenerate = circle_endpoints(source, [r])[0]
        et = source.edges
        if degenerate:
            return BoundaryNormals(np.zeros((0, 2)), np.zeros((0, 2)), [], excluded=len(ang))
        pts = np.stack([r * np.cos(ang), r * np.sin(ang)], axis=1) if len(ang) else np.zeros((0, 2))
        nus = np.array([et.inner_normal(int(i), float(t)) for i, t in zip(edges, ts)]).reshape(-1, 2)
        return BoundaryNormals(pts, nus, [normal_to_circ(n, p) for n, p in zip(nus, pts)])
    raise TypeError(f"no boundary normals for {type(source).__name__}")


# ---------------------------------------------------------------------------
# conditions


@dataclass
class ConditionA:
    passed: bool
    violating_measure: float
    fraction: float
    region_measure: float
    tolerance: float

    def to_json(self):
        return {"pass": self.passed, **{k: v for k, v in asdict(self).items() if k != "passed"}}


@dataclass
class ConditionB:
    passed: bool
    max_deviation: float
    n_checked: int
    violating_slices: list
    n_violating: int
    excised: list
    excised_measure: float
    budget: float
    tolerance: float

    def to_json(self):
        return {"pass": self.passed, **{k: v for k, v in asdict(self).items() if k != "passed"}}


def _region_measure(box: Box) -> float:
    return box.volume


def check_condition_a(source, region: Box, tol: float = EXACT_TOL) -> ConditionA:
    """Measure of parameters in ``region`` whose slice has two or more arcs."""
    size = _region_measure(region)
    if isinstance(source, ArcFamilySet):
        bad = 0.0
    elif isinstance(source, PolygonSet):
        lo, hi = region.bounds[0]
        lo = max(lo, 0.0)
        hi = min(hi, source.max_radius())
        bad = 0.0
        if hi > lo:
            cuts = sorted({lo, hi, *[c for c in source.critical_radii() if lo < c < hi]})
            for a, b in zip(cuts[:-1], cuts[1:]):
                mid = 0.5 * (a + b)
                if mid > 0 and slice_circle(source, mid).n_components >= 2:
                    bad += b - a
    elif isinstance(source, SliceGrid):
        mask = source.grid.cell_mask(region)
        counts = np.vectorize(lambda s: s.n_components, otypes=[int])(source.cells)
        bad = float(np.sum((counts >= 2) & mask)) * source.grid.cell_volume
    else:
        raise TypeError(f"cannot check {type(source).__name__}")
    return ConditionA(bad <= tol * size, bad, bad / size, size, tol)


def _sample_grid(grid: GridSpec, region: Box):
    mask = grid.cell_mask(region)
    pts = [m[mask] for m in grid.mesh()]
    return pts, grid.cell_volume


def _circ_rows(nu: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Vectorised circularised normals of rows ``nu`` at rows ``pts``."""
    rho = np.hypot(pts[:, 0], pts[:, 1])
    xh = pts[:, :2] / rho[:, None]
    rad = xh[:, 0] * nu[:, 0] + xh[:, 1] * nu[:, 1]
    tan = np.abs(-xh[:, 1] * nu[:, 0] + xh[:, 0] * nu[:, 1])
    return np.column_stack([rad, tan, nu[:, 2:]])


def _finish_b(devs, coords, degenerate, cell, tol, budget):
    """Apply the excision budget and build the verdict."""
    n = len(devs)
    order = np.argsort(-devs, kind="stable")
    allowed = int(math.floor(budget * n + 1e-9))
    n_deg = int(np.sum(degenerate))
    drop = max(0, allowed - n_deg)
    keep = np.ones(n, dtype=bool)
    keep[degenerate] = False
    dropped = [i for i in order if keep[i]][:drop]
    dropped = [i for i in dropped if devs[i] > tol]
    keep[dropped] = False
    excised = [{"slice": coords[i], "reason": "vertex or tangency"} for i in np.nonzero(degenerate)[0]]
    excised += [{"slice": coords[i], "reason": "budget", "deviation": float(devs[i])} for i in dropped]
    rest = devs[keep]
    worst = float(rest.max(initial=0.0))
    viol = [i for i in np.nonzero(keep & (devs > tol))[0]]
    listed = [{"slice": coords[i], "deviation": float(devs[i])} for i in viol[:MAX_LISTED]]
    return ConditionB(
        worst <= tol,
        worst,
        int(np.sum(keep)),
        listed,
        len(viol),
        excised[:MAX_LISTED],
        float(len(excised)) * cell,
        budget,
        tol,
    )


def polygon_bar_nu(P: PolygonSet, r):
    """``bar_nu`` rows of the symmetral of ``P`` from its exact width profile, with a
    mask of slices that have a boundary and a mask of degenerate slices."""
    half, state, degenerate = circle_profile(P, r)
    v = np.stack([np.where(degenerate, 0.0, half), np.ones_like(half)], axis=-1)
    v /= np.linalg.norm(v, axis=-1, keepdims=True)
    live = state == 1
    return np.where(live[:, None], v, 0.0), live, degenerate


def check_condition_b(
    source,
    symmetral,
    region: Box,
    tol: float = EXACT_TOL,
    budget: float = 0.0,
    grid: Optional[GridSpec] = None,
    profile: str = "exact",
) -> ConditionB:
    """Largest ``|nu_c - bar_nu|`` over sampled slice-boundary points in ``region``.

    Slices are the cell centres of ``grid`` (by default the grid of a
    distribution passed as ``symmetral``).  Slices whose boundary meets a
    vertex are excluded and listed; a further ``budget`` fraction of the
    worst slices may be discarded, and is reported.

    For polygon sources ``profile='exact'`` takes ``bar_nu`` from the exact
    width derivative at each slice; ``'grid'`` uses the interpolant of the
    sampled distribution instead.
    """
    if profile not in ("exact", "grid"):
        raise ValueError(f"unknown profile {profile!r}")
    F = _as_symmetral(symmetral)
    if grid is None:
        if isinstance(symmetral, GridFunction):
            grid = symmetral.grid
        else:
            grid = GridSpec.aligned(region, 1000 if F.k == 2 else 200, pad=0)
    pts, cell = _sample_grid(grid, region)
    r = pts[0]
    z = pts[1] if F.k == 3 else None
    if isinstance(source, PolygonSet) and profile == "exact":
        bar, live_f, _ = polygon_bar_nu(source, r)
    else:
        bar, live_f = bar_nu_field(F, r, z)
    n = len(r)
    devs = np.zeros(n)
    checked = np.zeros(n, dtype=bool)
    degenerate = np.zeros(n, dtype=bool)
    if isinstance(source, ArcFamilySet):
        tp, nup, tm, num, live_e = _graph_normals(source, r, z)
        both = live_e & live_f
        for th, nu in ((tp, nup), (tm, num)):
            p = np.stack([r * np.cos(th), r * np.sin(th)], axis=1)
            d = np.linalg.norm(_circ_rows(nu, p) - bar, axis=1)
            devs = np.maximum(devs, np.where(both, d, 0.0))
        checked = both
    elif isinstance(source, PolygonSet):
        rows, ang, edges, ts, deg = _circle_endpoints_flat(source, r)
        has = np.bincount(rows, minlength=n) > 0
        degenerate = has & live_f & deg
        checked = has & live_f & ~deg
        use = checked[rows]
        rows, ang = rows[use], ang[use]
        p = np.stack([r[rows] * np.cos(ang), r[rows] * np.sin(ang)], axis=1)
        nu = source.edges.inner_normals(edges[use], ts[use])
        np.maximum.at(devs, rows, np.linalg.norm(_circ_rows(nu, p) - bar[rows], axis=1))
    else:
        raise TypeError(f"cannot check condition (b) for {type(source).__name__}")
    sel = checked | degenerate
    coords = [tuple(float(c[i]) for c in pts) for i in np.nonzero(sel)[0]]
    return _finish_b(devs[sel], coords, degenerate[sel], cell, tol, budget)


# ---------------------------------------------------------------------------
# reports


@dataclass
class DiagnosticsReport:
    mode: str
    region: str
    p_set: float
    p_symmetral: float
    gap: float
    condition_a: ConditionA
    condition_b: ConditionB
    tolerance: dict
    routes: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    @property
    def equality(self) -> bool:
        return self.gap <= self.tolerance["gap"]

    def breaches(self) -> list[str]:
        out = []
        if self.gap < -self.tolerance["inequality"]:
            out.append(f"perimeter of the symmetral exceeds that of the set by {-self.gap:.3g}")
        both = self.condition_a.passed and self.condition_b.passed
        if self.equality != both:
            out.append(f"equality verdict {self.equality} but conditions a/b give {both}")
        return out

    @property
    def sound(self) -> bool:
        return not self.breaches()

    def to_json(self) -> dict:
        return _plain({
            "mode": self.mode,
            "region": self.region,
            "p_set": self.p_set,
            "p_symmetral": self.p_symmetral,
            "gap": self.gap,
            "equality": self.equality,
            "condition_a": self.condition_a.to_json(),
            "condition_b": self.condition_b.to_json(),
            "excised": {
                "count": len(self.condition_b.excised),
                "measure": self.condition_b.excised_measure,
                "budget": self.condition_b.budget,
                "slices": self.condition_b.excised,
            },
            "tolerance": self.tolerance,
            "routes": self.routes,
            "metadata": self.metadata,
            "sound": self.sound,
            "breaches": self.breaches(),
        })


def source_features(source, mode: str = "circular"):
    """Per-axis coordinates where the distribution of ``source`` may jump."""
    if isinstance(source, PolygonSet):
        return [source.jump_coordinates("radial" if mode == "circular" else "x")]
    if isinstance(source, ArcFamilySet):
        feats = [list(b) for b in source.domain]
        for ax, loc, _span, _h in source.walls():
            feats[ax].append(loc)
        return feats
    return None


def default_grid(region: Box, n=None, positive=True, features=None) -> GridSpec:
    if n is None:
        n = 1000 if region.dim == 1 else 200
    return GridSpec.aligned(region, n, positive_axis0=positive, features=features)


def verify_inequality(
    source,
    region: Box,
    n=None,
    tol: Optional[float] = None,
    n_q: int = DEFAULT_NQ,
    literal: bool = False,
    threshold: float = DEFAULT_THRESHOLD,
    conditions: bool = True,
) -> DiagnosticsReport:
    """Compare the perimeter of ``source`` with that of its circular symmetral over
    ``Φ(region × S^1)`` and diagnose conditions (a) and (b)."""
    grid = default_grid(region, n, features=source_features(source))
    h = max(grid.spacing)
    mu = distribution(source, grid, "circular")
    sigma = sigma_measure(mu, literal=literal, threshold=threshold)
    tv = total_variation(sigma, region)
    routes = {"total_variation": tv, "formula": perimeter_F_mu_formula(mu, region, threshold, literal)}
    meta = {"grid": grid.to_json(), "n_q": n_q, "literal_sigma": literal, "threshold": threshold}
    if isinstance(source, PolygonSet):
        p_set = polygon_perimeter(source, region, "circular")
        p_sym = tv
        exact = polygon_symmetral_perimeter(source, region, literal)
        routes["quadrature_symmetral"] = exact.refined
        routes["quadrature_symmetral_difference"] = exact.difference
        # the grid error of the symmetral perimeter is known from the exact-profile route
        est = 2 * abs(tv - exact.refined) + 10 * exact.difference
        tols = {"b": EXACT_TOL if tol is None else tol, "gap": max(EXACT_TOL, est), "inequality": 10 * h}
        budget = 0.0
        sym = mu
        meta["source"] = "polygon"
    elif isinstance(source, ArcFamilySet):
        pe = arcfamily_perimeter(source, region, n_q)
        S = exact_symmetral(source)
        ps = arcfamily_perimeter(S, region, n_q)
        p_set, p_sym = pe.refined, ps.refined
        routes["quadrature_symmetral"] = p_sym
        routes["quadrature_set_difference"] = pe.difference
        routes["quadrature_symmetral_difference"] = ps.difference
        q = max(pe.difference, ps.difference)
        tols = {
            "b": EXACT_TOL if tol is None else tol,
            "gap": max(EXACT_TOL, 10 * q),
            "inequality": max(EXACT_TOL, 10 * q),
        }
        budget = 0.0
        sym = S
        meta["source"] = "arc_family"
    else:
        raise TypeError(f"cannot verify {type(source).__name__}")
    if isinstance(source, PolygonSet) or source.k == 2:
        F = build_F_mu(mu, threshold)
        routes["quadrature_F_mu"] = arcfamily_perimeter(F, region, n_q, check=False).refined
    ca = check_condition_a(source, region, EXACT_TOL)
    if conditions:
        cb = check_condition_b(source, sym, region, tols["b"], budget, grid=grid)
    else:
        cb = ConditionB(True, 0.0, 0, [], 0, [], 0.0, budget, tols["b"])
        meta["condition_b"] = "skipped"
    rep = DiagnosticsReport(
        "circular", region.format(), p_set, p_sym, p_set - p_sym, ca, cb, tols, routes, meta
    )
    return rep


# ---------------------------------------------------------------------------
# structural checks on F_mu


@dataclass
class PropositionReport:
    n_checked: int
    n_wall_points: int
    constancy: float  # (i) max |nu_c(+) - nu_c(-)|
    rotation: float  # (ii) max deviation from rotation covariance
    reflection: float  # (iii) max |nu(-) - Ref nu(+)|
    tolerance: float

    @property
    def passed(self) -> bool:
        return max(self.constancy, self.rotation, self.reflection) <= self.tolerance

    def to_json(self):
        return {**asdict(self), "pass": self.passed}


def verify_symmetral_propositions(sym, region: Box, n_checks: int = 1000, seed: int = 0, tol: float = 1e-9):
    """Check, on random slices of the symmetral, that

    (i) the circularised normals at the two slice endpoints agree;
    (ii) rotating a boundary point by any admissible angle towards the
    axis (staying on the slice boundary) rotates its normal with it;
    (iii) the normals at the endpoints are reflections of each other.
    """
    F = _as_symmetral(sym)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    lims = [(max(lo, dlo), min(hi, dhi)) for (lo, hi), (dlo, dhi) in zip(region.bounds, F.domain)]
    r = rng.uniform(lims[0][0], lims[0][1], 4 * n_checks)
    z = rng.uniform(lims[1][0], lims[1][1], 4 * n_checks) if F.k == 3 else None
    xi = F.xi_at(r, z)
    ok = (xi > 0) & (xi < TWO_PI)
    r = r[ok][:n_checks]
    z = z[ok][:n_checks] if z is not None else None
    tp, nup, tm, num, _ = _graph_normals(F, r, z)
    pp = np.stack([r * np.cos(tp), r * np.sin(tp)], axis=1)
    pm = np.stack([r * np.cos(tm), r * np.sin(tm)], axis=1)
    c_plus, c_minus = _circ_rows(nup, pp), _circ_rows(num, pm)
    constancy = float(np.linalg.norm(c_plus - c_minus, axis=1).max(initial=0.0))
    ref = nup.copy()
    ref[:, 1] = -ref[:, 1]
    reflection = float(np.linalg.norm(num - ref, axis=1).max(initial=0.0))
    # (ii) on a regular slice the admissible rotations of the endpoint +xi/2
    # towards the axis never land on another boundary point, so only wall
    # arcs (where xi jumps and the boundary follows the circle) constrain it
    rotation = 0.0
    # wall slices: boundary arcs on circles where xi jumps carry normal ±r_hat
    n_wall = 0
    for ax, loc, span, height in F.walls():
        if ax != 0 or not region.contains_coord(0, loc, 1e-9 * F.xi.grid.spacing[0]):
            continue
        zc = None if F.k == 2 else 0.5 * (span[0] + span[1])
        left = float(F.xi(loc - 1e-12 * max(1.0, loc), zc))
        right = float(F.xi(loc + 1e-12 * max(1.0, loc), zc))
        lo, hi = sorted((0.5 * max(left, 0.0), 0.5 * min(right, TWO_PI)))
        if hi - lo < 1e-9:
            continue
        sign = 1.0 if right > left else -1.0  # set lies outside the circle on the wider side
        betas = rng.uniform(lo, hi, 8)
        for beta in np.concatenate([betas, -betas]):
            nu = sign * np.array([math.cos(beta), math.sin(beta)])
            a, b = sorted((-beta, 0.0))
            for gam in rng.uniform(a, b, 4):
                tgt = beta + gam
                if not lo <= abs(tgt) <= hi:
                    continue
                c, s = math.cos(gam), math.sin(gam)
                rotated = np.array([c * nu[0] - s * nu[1], s * nu[0] + c * nu[1]])
                direct = sign * np.array([math.cos(tgt), math.sin(tgt)])
                rotation = max(rotation, float(np.linalg.norm(rotated - direct)))
                n_wall += 1
    return PropositionReport(len(r), n_wall, constancy, rotation, reflection, tol)
