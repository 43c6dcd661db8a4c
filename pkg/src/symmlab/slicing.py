"""Circular and vertical slices, and the distribution functions they define."""

from __future__ import annotations


import numpy as np

from ._parallel import chunks, n_threads, pmap
from .arcfamily import ArcFamilySet
from .grid import GridFunction, GridSpec, SliceGrid
from .polygon import PolygonSet
from .sets import TWO_PI, AngularArcSet, IntervalSet


class DistributionError(ValueError):
    """A sampled distribution violates 0 <= mu <= 2 pi r (or v >= 0)."""


def _circle_gaps(P: PolygonSet, radii):
    """Angular gaps between consecutive crossings and whether each lies in P."""
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    ang = P.edges.circle_crossings(radii)[0]
    ang = np.sort(ang, axis=1)
    cnt = np.sum(np.isfinite(ang), axis=1)
    K = ang.shape[1]
    j = np.arange(K)[None, :]
    nxt = np.concatenate([ang[:, 1:], np.full((len(radii), 1), np.nan)], axis=1)
    start = ang
    end = np.where(j + 1 < cnt[:, None], nxt, ang[:, :1] + TWO_PI)
    valid = j < cnt[:, None]
    mid = np.where(valid, 0.5 * (start + end), 0.0)
    mid[cnt == 0, 0] = 0.0
    test = valid.copy()
    test[cnt == 0, 0] = True
    rr = np.broadcast_to(radii[:, None], mid.shape)
    pts = np.stack([rr[test] * np.cos(mid[test]), rr[test] * np.sin(mid[test])], axis=1)
    inside = np.zeros(mid.shape, dtype=bool)
    if len(pts):
        inside[test] = P.contains(pts)
    return start, end, inside, valid, cnt


def circle_measures(P: PolygonSet, radii) -> np.ndarray:
    """H^1 measure of the circular slices of ``P`` at each radius."""
    radii = np.atleast_1d(np.asarray(radii, dtype=float))

    def work(span):
        s, e = span
        start, end, inside, valid, cnt = _circle_gaps(P, radii[s:e])
        width = np.where(valid & inside, end - start, 0.0).sum(axis=1)
        width = np.where(cnt == 0, np.where(inside[:, 0], TWO_PI, 0.0), width)
        return radii[s:e] * width

    parts = pmap(work, chunks(len(radii), max(1, n_threads())))
    return np.concatenate(parts) if parts else np.zeros(0)


def slice_circle(P: PolygonSet, r: float) -> AngularArcSet:
    """The slice ``{|x| = r} ∩ P`` as exact angular arcs."""
    if not r > 0:
        raise ValueError("slice radius must be positive")
    start, end, inside, valid, cnt = _circle_gaps(P, [r])
    if cnt[0] == 0:
        return AngularArcSet(r, full=bool(inside[0, 0]))
    arcs = [(start[0, k], end[0, k]) for k in range(cnt[0]) if inside[0, k]]
    return AngularArcSet(r, tuple(arcs))


def _line_gaps(P: PolygonSet, xs):
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    ys = np.sort(P.edges.line_crossings(xs)[0], axis=1)
    cnt = np.sum(np.isfinite(ys), axis=1)
    K = ys.shape[1]
    j = np.arange(K)[None, :]
    nxt = np.concatenate([ys[:, 1:], np.full((len(xs), 1), np.nan)], axis=1)
    valid = j + 1 < cnt[:, None]
    mid = np.where(valid, 0.5 * (ys + nxt), 0.0)
    xx = np.broadcast_to(xs[:, None], mid.shape)
    inside = np.zeros(mid.shape, dtype=bool)
    if valid.any():
        inside[valid] = P.contains(np.stack([xx[valid], mid[valid]], axis=1))
    return ys, nxt, inside, valid


def vertical_measures(P: PolygonSet, xs) -> np.ndarray:
    """H^1 measure of the vertical slices ``{x_1 = x'} ∩ P``."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))

    def work(span):
        s, e = span
        lo, hi, inside, valid = _line_gaps(P, xs[s:e])
        return np.where(valid & inside, hi - lo, 0.0).sum(axis=1)

    parts = pmap(work, chunks(len(xs), max(1, n_threads())))
    return np.concatenate(parts) if parts else np.zeros(0)


def slice_vertical(P: PolygonSet, x: float) -> IntervalSet:
    """The slice ``{y : (x, y) ∈ P}`` as open intervals."""
    lo, hi, inside, valid = _line_gaps(P, [x])
    ivs = [(lo[0, k], hi[0, k]) for k in range(lo.shape[1]) if valid[0, k] and inside[0, k]]
    return IntervalSet(tuple(ivs))


def _check_bounds(values, grid: GridSpec, mode: str):
    if mode == "circular":
        r = grid.centers(0).reshape((-1,) + (1,) * (grid.dim - 1))
        bad = (values < -1e-12) | (values > TWO_PI * r * (1 + 1e-12) + 1e-12)
    else:
        bad = values < -1e-12
    if np.any(bad):
        idx = tuple(int(i) for i in np.argwhere(bad)[0])
        raise DistributionError(f"compatibility bound violated at cell {idx}")
    if mode == "circular":
        return np.clip(values, 0.0, TWO_PI * r)
    return np.maximum(values, 0.0)


def distribution(source, grid: GridSpec, mode: str = "circular") -> GridFunction:
    """Sample mu (circular) or v (steiner) at the cell centres of ``grid``."""
    if mode not in ("circular", "steiner"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "circular" and grid.centers(0).min() <= 0:
        raise DistributionError("circular grids need positive cell radii")
    if isinstance(source, PolygonSet):
        if grid.dim != 1:
            raise ValueError("planar polygon sets are sliced on one-dimensional grids")
        x = grid.centers(0)
        vals = circle_measures(source, x) if mode == "circular" else vertical_measures(source, x)
    elif isinstance(source, ArcFamilySet):
        if mode != "circular":
            raise ValueError("arc families are sliced in circular mode only")
        if grid.dim != source.k - 1:
            raise ValueError("grid dimension does not match the arc family")
        if grid.dim == 1:
            r = grid.centers(0)
            vals = r * source.xi_at(r)
        else:
            R, Z = grid.mesh()
            vals = R * source.xi_at(R, Z)
    elif isinstance(source, SliceGrid):
        if source.grid != grid or source.mode != mode:
            raise ValueError("slice grid does not match the requested grid/mode")
        vals = source.measures()
    else:
        raise TypeError(f"cannot slice {type(source).__name__}")
    vals = _check_bounds(np.asarray(vals, dtype=float).reshape(grid.shape), grid, mode)
    return GridFunction(grid, vals, mode, "mu" if mode == "circular" else "v")


def xi_from_mu(mu: GridFunction) -> GridFunction:
    """Angular width xi = mu / r at each cell centre."""
    if mu.mode != "circular":
        raise ValueError("xi is defined for circular distributions only")
    xi = np.clip(mu.values / mu.radii(), 0.0, TWO_PI)
    return GridFunction(mu.grid, xi, "circular", "xi")


def slice_grid(source, grid: GridSpec, mode: str = "circular") -> SliceGrid:
    """Per-cell slices of a polygon or arc family at the cell centres."""
    cells = np.empty(grid.shape, dtype=object)
    if mode == "circular":
        if grid.dim == 1:
            for i, r in enumerate(grid.centers(0)):
                cells[i] = slice_circle(source, r) if isinstance(source, PolygonSet) else source.slice(r)
        else:
            for i, r in enumerate(grid.centers(0)):
                for j, z in enumerate(grid.centers(1)):
                    cells[i, j] = source.slice(r, z)
    else:
        for i, x in enumerate(grid.centers(0)):
            cells[i] = slice_vertical(source, x)
    return SliceGrid(grid, cells, mode)


def _circle_endpoints_flat(P: PolygonSet, radii):
    """Slice endpoints of all radii at once: ``(rows, angles, edges, params, degenerate)``
    with one entry per endpoint in the first four and one flag per radius in the last."""
    from .polygon import VERTEX_EPS

    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    ang, _, _, edge, T = P.edges.circle_crossings(radii)
    order = np.argsort(ang, axis=1)
    ang_s = np.take_along_axis(ang, order, axis=1)
    T_s = np.take_along_axis(T, order, axis=1)
    E_s = edge[order]
    start, end, inside, valid, cnt = _circle_gaps(P, radii)
    width = np.where(valid, end - start, np.inf)
    t = np.where(valid, T_s, 0.5)
    degenerate = np.any((t < VERTEX_EPS) | (t > 1 - VERTEX_EPS) | (width < 1e-12), axis=1)
    # the gap before crossing k is gap k-1, cyclically among the cnt crossings of the row
    j = np.arange(ang.shape[1])[None, :]
    prev = np.where(j == 0, np.maximum(cnt[:, None] - 1, 0), j - 1)
    change = valid & (inside != np.take_along_axis(inside, prev, axis=1))
    rows, cols = np.nonzero(change)
    return rows, ang_s[rows, cols], E_s[rows, cols], T_s[rows, cols], degenerate & (cnt > 0)


def circle_endpoints(P: PolygonSet, radii):
    """Boundary points of each circular slice with the edge they lie on.

    Returns one ``(angles, edges, params, degenerate)`` tuple per radius.
    ``degenerate`` flags slices that touch a vertex or are tangent to an
    edge; their endpoints are not reduced-boundary points.
    """
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    rows, ang, edges, ts, degenerate = _circle_endpoints_flat(P, radii)
    bounds = np.searchsorted(rows, np.arange(len(radii) + 1))
    out = []
    for k in range(len(radii)):
        a, b = bounds[k], bounds[k + 1]
        out.append((ang[a:b], edges[a:b].astype(int), ts[a:b], bool(degenerate[k])))
    return out


def line_endpoints(P: PolygonSet, xs):
    """Boundary points of each vertical slice, as :func:`circle_endpoints` does for circles."""
    from .polygon import VERTEX_EPS

    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    Y, edge, T = P.edges.line_crossings(xs)
    order = np.argsort(Y, axis=1)
    Y_s = np.take_along_axis(Y, order, axis=1)
    T_s = np.take_along_axis(T, order, axis=1)
    E_s = edge[order]
    lo, hi, inside, valid = _line_gaps(P, xs)
    out = []
    for row in range(len(xs)):
        n = int(np.sum(np.isfinite(Y_s[row])))
        if n == 0:
            out.append((np.zeros(0), np.zeros(0, int), np.zeros(0), False))
            continue
        t = T_s[row, :n]
        gaps = np.diff(Y_s[row, :n])
        degenerate = bool(np.any((t < VERTEX_EPS) | (t > 1 - VERTEX_EPS)) or np.any(gaps < 1e-12))
        ins = np.concatenate([[False], inside[row, : n - 1], [False]])
        change = ins[1:] != ins[:-1]
        out.append((Y_s[row, :n][change], E_s[row, :n][change], t[change], degenerate))
    return out


def circle_profile(P: PolygonSet, radii):
    """Exact ``r xi'(r) / 2`` of the slice width at each radius, read off the boundary.

    An endpoint whose inner normal has radial part ``a`` and tangential part
    ``b`` moves by ``dtheta/dr = -a / (r b)``; summed with the sign that makes
    the arc grow this is ``xi' = sum a / (r |b|)``.  Returns ``(half_slope,
    state, degenerate)`` with ``state`` 0 empty, 1 with boundary, 2 full; the
    slope is NaN on degenerate radii.
    """
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    n = len(radii)
    rows, ang, edges, ts, degenerate = _circle_endpoints_flat(P, radii)
    counts = np.bincount(rows, minlength=n)
    state = np.where(counts > 0, 1, 0)
    bare = np.nonzero(counts == 0)[0]
    if len(bare):
        pts = np.stack([radii[bare], np.zeros(len(bare))], axis=1)
        state[bare] = np.where(P.contains(pts), 2, 0)
    slope = np.zeros(n)
    if len(rows):
        nu = P.edges.inner_normals(edges, ts)
        c, s = np.cos(ang), np.sin(ang)
        a = c * nu[:, 0] + s * nu[:, 1]
        b = np.abs(-s * nu[:, 0] + c * nu[:, 1])
        bad = degenerate[rows] | (b == 0)
        np.add.at(slope, rows[~bad], 0.5 * a[~bad] / b[~bad])
    slope[degenerate & (counts > 0)] = np.nan
    return slope, state, degenerate


def line_profile(P: PolygonSet, xs):
    """Exact ``v'(x)`` of the vertical slice measure, as :func:`circle_profile` does for circles.

    Each endpoint contributes ``nu_x / |nu_y|`` of its inner normal.
    Returns ``(slope, live, degenerate)``.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    et = P.edges
    slope = np.zeros(len(xs))
    live = np.zeros(len(xs), dtype=bool)
    degenerate = np.zeros(len(xs), dtype=bool)
    for k, (ys, edges, ts, deg) in enumerate(line_endpoints(P, xs)):
        if len(ys) == 0:
            continue
        live[k] = True
        if deg:
            degenerate[k] = True
            slope[k] = np.nan
            continue
        nu = et.inner_normals(edges, ts)
        slope[k] = float(np.sum(nu[:, 0] / np.abs(nu[:, 1])))
    return slope, live, degenerate
