"""Perimeter by exact boundary length, by quadrature of graph surfaces,
and by the closed-form integrand over a distribution; plus the coarea identity."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .arcfamily import ArcFamilySet
from .bv import DEFAULT_THRESHOLD, JumpSet, _support, split_axis
from .grid import FACE_EPS, Box, GridFunction
from .polygon import PolygonSet
from .sets import TWO_PI
from .slicing import circle_profile, slice_circle

DEFAULT_NQ = 2048
_LEVEL_TOL = 1e-12
_CHUNK = 1 << 20


class QuadratureError(ValueError):
    """Sampled field differences exceed the declared Lipschitz bound."""


def _level(P: PolygonSet, i: int, t: float, kind: str) -> float:
    p = P.edges.point(i, t)
    return float(math.hypot(p[0], p[1])) if kind == "radial" else float(p[0])


def _classify(box: Box, value: float) -> bool:
    lo, hi = box.bounds[0]
    tol = _LEVEL_TOL * max(1.0, abs(lo), abs(hi))
    return bool(box.contains_coord(0, value, tol))


def _pieces_in(P: PolygonSet, box: Box, kind: str):
    """Edge pieces monotone in the level function with midpoint level in ``box``."""
    et = P.edges
    levels = list(box.bounds[0])
    for i in range(et.m):
        for t0, t1, length in et.pieces(i, kind, levels):
            if _classify(box, _level(P, i, 0.5 * (t0 + t1), kind)):
                yield i, t0, t1, length


def polygon_perimeter(P: PolygonSet, region: Box, mode: str = "circular") -> float:
    """Length of the boundary of ``P`` over the band ``{|x| ∈ region}`` (circular)
    or the strip ``{x_1 ∈ region}`` (steiner).  Faces count per ``region.closed``."""
    if region.dim != 1:
        raise ValueError("planar polygon perimeters take a one-dimensional region")
    kind = "radial" if mode == "circular" else "x"
    return math.fsum(length for *_, length in _pieces_in(P, region, kind))


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    refined: float
    n_q: int

    @property
    def difference(self) -> float:
        return abs(self.refined - self.value)

    def __float__(self):
        return self.refined


def _clip_box(A: ArcFamilySet, box: Box):
    out = []
    for (lo, hi), (dlo, dhi) in zip(box.bounds, A.domain):
        out.append((max(lo, dlo), min(hi, dhi)))
    return out


def _midpoints(lo, hi, n):
    return lo + (np.arange(n) + 0.5) * (hi - lo) / n


def _lateral(A: ArcFamilySet, r, z):
    """Sum of the area elements of the two lateral graphs theta_c ± xi/2."""
    zz = None if A.k == 2 else z
    xi = A.xi(r, zz)
    xr, xz = A.xi.grad(r, zz)
    cr, cz = A.theta_c.grad(r, zz)
    live = (xi > 0) & (xi < TWO_PI)
    tot = np.zeros_like(r)
    for s in (0.5, -0.5):
        tr = cr + s * xr
        tz = cz + s * xz
        tot += np.sqrt(1.0 + r * r * tr * tr + r * r * tz * tz)
    return np.where(live, tot, 0.0)


def _face_in(box: Box, ax: int, value: float, h: float) -> bool:
    return bool(box.contains_coord(ax, value, FACE_EPS * h))


def _quadrature(A: ArcFamilySet, box: Box, n: int) -> float:
    lims = _clip_box(A, box)
    if any(hi <= lo for lo, hi in lims):
        return 0.0
    (rlo, rhi) = lims[0]
    rr = _midpoints(rlo, rhi, n)
    hr = (rhi - rlo) / n
    total = 0.0
    if A.k == 2:
        total += float(np.sum(_lateral(A, rr, np.zeros_like(rr)))) * hr
        zz, hz = None, 1.0
    else:
        zlo, zhi = lims[1]
        zz = _midpoints(zlo, zhi, n)
        hz = (zhi - zlo) / n
        step = max(1, _CHUNK // n)
        parts = []
        for s in range(0, n, step):
            R, Z = np.meshgrid(rr[s : s + step], zz, indexing="ij")
            parts.append(float(np.sum(_lateral(A, R, Z))))
        total += math.fsum(parts) * hr * hz
    # caps on the faces of the domain where the set ends
    for face in A.domain[0]:
        if _face_in(box, 0, face, hr):
            if A.k == 2:
                total += face * float(A.xi_at(face))
            else:
                total += face * float(np.sum(A.xi_at(np.full_like(zz, face), zz))) * hz
    if A.k == 3:
        for face in A.domain[1]:
            if _face_in(box, 1, face, hz):
                total += float(np.sum(rr * A.xi_at(rr, np.full_like(rr, face)))) * hr
    # walls where the width field jumps
    for ax, loc, span, height in A.walls():
        h = hr if ax == 0 else hz
        if not _face_in(box, ax, loc, h):
            continue
        if A.k == 2:
            total += loc * abs(height)
            continue
        o = 1 - ax
        a, b = span
        lo, hi = lims[o]
        a, b = max(a, lo), min(b, hi)
        if b <= a:
            continue
        if ax == 0:
            total += loc * abs(height) * (b - a)
        else:
            total += abs(height) * 0.5 * (b * b - a * a)
    return total


def _check_lipschitz(A: ArcFamilySet, box: Box, n: int):
    """Refuse when sampled difference quotients exceed the declared bound (walls excluded)."""
    lims = _clip_box(A, box)
    L = A.lipschitz_bound
    walls = A.walls()
    axes = [_midpoints(lo, hi, n) for lo, hi in lims]
    for fld, name in ((A.xi, "xi"), (A.theta_c, "theta_c")):
        for ax in range(A.k - 1):
            x = axes[ax]
            if A.k == 2:
                v = fld(x)[:, None]
            else:
                other = axes[1 - ax][:: max(1, n // 16)]
                X, O = np.meshgrid(x, other, indexing="ij")
                v = fld(X, O) if ax == 0 else fld(O, X)
            dv = np.abs(np.diff(v, axis=0)) / np.diff(x)[:, None]
            skip = np.zeros(len(x) - 1, dtype=bool)
            for wax, loc, _span, _h in walls:
                if wax == ax:
                    skip |= (x[:-1] < loc) & (x[1:] > loc)
            worst = float(np.where(skip[:, None], 0.0, dv).max(initial=0.0))
            if worst > L * (1 + 1e-6) + 1e-9:
                raise QuadratureError(f"{name} changes at rate {worst:.6g} above the declared bound {L:.6g}")


def arcfamily_perimeter(A: ArcFamilySet, region: Box, n_q: int = DEFAULT_NQ, check=True) -> QuadratureResult:
    """Perimeter of an arc family over ``Φ(region × S^1)`` by midpoint quadrature.

    Lateral graphs are integrated at ``n_q`` and ``2 n_q`` points per axis;
    caps on domain faces and walls at jumps are added when their face lies
    in ``region`` (per its closure).
    """
    if region.dim != A.k - 1:
        raise ValueError("region dimension does not match the arc family")
    if check:
        _check_lipschitz(A, region, n_q)
    return QuadratureResult(_quadrature(A, region, n_q), _quadrature(A, region, 2 * n_q), n_q)


def formula_terms(mu: GridFunction, threshold=DEFAULT_THRESHOLD, literal=False):
    """Per-cell closed-form integrand and the jump set of a circular distribution."""
    g = mu.grid
    r = mu.radii()
    sr = split_axis(mu.values / r, g.spacing[0], 0, threshold)
    a = r * sr.ac
    splits = [sr]
    if g.dim == 2:
        sz = split_axis(mu.values, g.spacing[1], 1, threshold)
        b = sz.ac
        splits.append(sz)
    else:
        b = None
    chi, _ = _support(mu, literal)
    if b is None:
        dens = np.where(chi, 2.0 * np.sqrt(1.0 + 0.25 * (a * a)), np.sqrt(a * a))
    else:
        dens = np.where(
            chi,
            2.0 * np.sqrt((1.0 + 0.25 * (a * a)) + 0.25 * (b * b)),
            np.sqrt(a * a + b * b),
        )
    return dens, JumpSet.from_splits(g, splits)


def perimeter_F_mu_formula(mu: GridFunction, region: Box, threshold=DEFAULT_THRESHOLD, literal=False) -> float:
    """``2 ∫ sqrt(1 + |r d_r xi|²/4 + |d_z mu|²/4)`` over the support in ``region``,
    the gradient part off the support, plus the jump masses (radial ones scaled by r)."""
    if mu.mode != "circular":
        raise ValueError("the symmetral formula needs a circular distribution")
    g = mu.grid
    dens, jumps = formula_terms(mu, threshold, literal)
    mask = g.cell_mask(region)
    ac_part = float(np.sum(dens[mask] * g.cell_volume))
    keep = jumps.in_box(region)
    mags = np.empty(jumps.n)
    for j in range(jumps.n):
        if jumps.axis[j] == 0:
            other = g.spacing[1] if g.dim == 2 else 1.0
            mags[j] = abs(jumps.loc[j] * jumps.mass[j] * other)
        else:
            mags[j] = abs(jumps.mass[j] * g.spacing[0])
    return ac_part + float(np.sum(mags[keep]))


def _gauss_smoothstep(n: int):
    """Gauss-Legendre nodes and weights on [0, 1] pushed through ``3u^2 - 2u^3``.

    The map has zero slope at both ends, which absorbs the inverse square
    root growth of the width derivative at tangency radii.
    """
    x, w = np.polynomial.legendre.leggauss(n)
    u = 0.5 * (x + 1.0)
    return u * u * (3.0 - 2.0 * u), 0.5 * w * 6.0 * u * (1.0 - u)


def _symmetral_density(P: PolygonSet, r, literal: bool):
    half, state, degenerate = circle_profile(P, r)
    half = np.where(degenerate, 0.0, half)
    live = (state == 1) | ((state == 2) & literal)
    return np.where(live, 2.0 * np.sqrt(1.0 + half * half), 0.0)


def polygon_symmetral_perimeter(P: PolygonSet, region: Box, literal: bool = False, n_q: int = 32) -> QuadratureResult:
    """Perimeter of the circular symmetral of ``P`` over the band, from the exact width profile.

    The lateral part integrates ``2 sqrt(1 + (r xi'/2)^2)`` between
    consecutive critical radii with ``n_q`` and ``2 n_q`` nodes; circles of
    concentric boundary arcs add ``r |jump of xi|``.  Full slices count only
    with ``literal``, as in the distributional routes.
    """
    lo, hi = region.bounds[0]
    lo, top = max(lo, 0.0), min(hi, P.max_radius())
    et = P.edges
    totals = []
    for n in (n_q, 2 * n_q):
        u, w = _gauss_smoothstep(n)
        cuts = sorted({lo, top, *[c for c in P.critical_radii() if lo < c < top]}) if top > lo else []
        parts = []
        for a, b in zip(cuts[:-1], cuts[1:]):
            r = a + (b - a) * u
            parts.append(float(np.dot(w, _symmetral_density(P, r, literal))) * (b - a))
        totals.append(math.fsum(parts))
    jumps = {}
    for i in range(et.m):
        if et.is_concentric(i) and _classify(region, float(et.R[i])):
            # inner normal -s r_hat: a ccw arc (s > 0) closes the slice when r grows
            jumps[float(et.R[i])] = jumps.get(float(et.R[i]), 0.0) - float(et.sweep[i])
    cap = math.fsum(c * abs(dxi) for c, dxi in jumps.items())
    return QuadratureResult(totals[0] + cap, totals[1] + cap, n_q)


@dataclass(frozen=True)
class CoareaResult:
    lhs: float
    rhs: float

    @property
    def gap(self) -> float:
        return abs(self.lhs - self.rhs)


def coarea_check(P: PolygonSet, g: Callable[[float], float], region: Box) -> CoareaResult:
    """Compare ``∫ g(|x|) |ν_∥| dH^1`` over the boundary in the band with
    ``∫ g(r) · #(boundary points on |x| = r) dr``."""
    et = P.edges
    opts = dict(epsabs=1e-13, epsrel=1e-12, limit=200)
    lhs_terms = []
    for i, t0, t1, length in _pieces_in(P, region, "radial"):
        L = et.length(i)

        def integrand(t, i=i, L=L):
            p = et.point(i, t)
            rho = math.hypot(p[0], p[1])
            nu = et.inner_normal(i, t)
            tang = abs(-p[1] * nu[0] + p[0] * nu[1]) / rho
            return g(rho) * tang * L

        lhs_terms.append(quad(integrand, t0, t1, **opts)[0])
    lo, hi = region.bounds[0]
    hi = min(hi, P.max_radius())
    lo = max(lo, 0.0)
    rhs_terms = []
    if hi > lo:
        cuts = sorted({lo, hi, *[c for c in P.critical_radii() if lo < c < hi]})
        for a, b in zip(cuts[:-1], cuts[1:]):
            mid = 0.5 * (a + b)
            if mid <= 0:
                continue
            count = len(slice_circle(P, mid).endpoints())
            if count:
                rhs_terms.append(count * quad(g, a, b, **opts)[0])
    return CoareaResult(math.fsum(lhs_terms), math.fsum(rhs_terms))
