"""Exact planar sets bounded by line segments and circular arcs.

A :class:`PolygonSet` is stored with every ring oriented so that the set lies
to the left of the direction of travel (outer rings counter-clockwise, holes
clockwise).  All kernels below rely on that convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .sets import TWO_PI, GeometryError

# per-edge arc description: (center_x, center_y, ccw)
ArcSpec = Optional[tuple[float, float, bool]]

_T_EPS = 1e-12
VERTEX_EPS = 1e-9


@dataclass(frozen=True)
class Ring:
    vertices: tuple[tuple[float, float], ...]
    orientation: str = "outer"
    arcs: Optional[tuple[ArcSpec, ...]] = None

    def __post_init__(self):
        verts = tuple((float(x), float(y)) for x, y in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if self.orientation not in ("outer", "hole"):
            raise GeometryError(f"ring orientation must be 'outer' or 'hole', got {self.orientation!r}")
        n = len(verts)
        arcs = self.arcs
        if arcs is None:
            arcs = (None,) * n
        arcs = tuple(
            None if a is None else (float(a[0]), float(a[1]), bool(a[2])) for a in arcs
        )
        if len(arcs) != n:
            raise GeometryError("one arc entry (or null) is needed per ring edge")
        object.__setattr__(self, "arcs", arcs)
        if n == 0:
            raise GeometryError("empty ring")
        if n < 3 and all(a is None for a in arcs):
            raise GeometryError("a straight-edged ring needs at least three vertices")
        if not all(math.isfinite(c) for v in verts for c in v):
            raise GeometryError("non-finite vertex coordinate")

    @property
    def n_edges(self) -> int:
        return len(self.vertices)

    def reversed(self) -> "Ring":
        n = self.n_edges
        verts = self.vertices[::-1]
        arcs = []
        for j in range(n):
            a = self.arcs[(n - 2 - j) % n]
            arcs.append(None if a is None else (a[0], a[1], not a[2]))
        return Ring(verts, self.orientation, tuple(arcs))


def _arc_geometry(a, b, spec):
    cx, cy, ccw = spec
    ra = math.hypot(a[0] - cx, a[1] - cy)
    rb = math.hypot(b[0] - cx, b[1] - cy)
    if ra == 0.0 or abs(ra - rb) > 1e-9 * max(ra, 1.0):
        raise GeometryError("arc endpoints are not equidistant from the arc center")
    p0 = math.atan2(a[1] - cy, a[0] - cx)
    p1 = math.atan2(b[1] - cy, b[0] - cx)
    if ccw:
        sweep = (p1 - p0) % TWO_PI
        if sweep < 1e-14:
            sweep = TWO_PI
    else:
        sweep = -((p0 - p1) % TWO_PI)
        if sweep > -1e-14:
            sweep = -TWO_PI
    return ra, p0, sweep


class EdgeTable:
    """Flat numpy view of all ring edges."""

    def __init__(self, rings: Sequence[Ring]):
        a, b, is_arc, c, rad, phi0, sweep, ring_id = [], [], [], [], [], [], [], []
        for k, ring in enumerate(rings):
            n = ring.n_edges
            for i in range(n):
                p, q = ring.vertices[i], ring.vertices[(i + 1) % n]
                spec = ring.arcs[i]
                if spec is None:
                    if p == q or math.hypot(q[0] - p[0], q[1] - p[1]) == 0.0:
                        raise GeometryError(f"zero-length edge {i} in ring {k}")
                    is_arc.append(False)
                    c.append((0.0, 0.0))
                    rad.append(0.0)
                    phi0.append(0.0)
                    sweep.append(0.0)
                else:
                    if n == 1 and p != q:
                        raise GeometryError("single-edge ring must close on itself")
                    if p == q and n > 1:
                        raise GeometryError(f"zero-length edge {i} in ring {k}")
                    R, p0, sw = _arc_geometry(p, q, spec)
                    is_arc.append(True)
                    c.append(spec[:2])
                    rad.append(R)
                    phi0.append(p0)
                    sweep.append(sw)
                a.append(p)
                b.append(q)
                ring_id.append(k)
        self.a = np.array(a, dtype=float).reshape(-1, 2)
        self.b = np.array(b, dtype=float).reshape(-1, 2)
        self.d = self.b - self.a
        self.is_arc = np.array(is_arc, dtype=bool)
        self.c = np.array(c, dtype=float).reshape(-1, 2)
        self.R = np.array(rad, dtype=float)
        self.phi0 = np.array(phi0, dtype=float)
        self.sweep = np.array(sweep, dtype=float)
        self.ring = np.array(ring_id, dtype=int)
        self.m = len(a)

    # parametrisation ---------------------------------------------------
    def point(self, i: int, t: float) -> np.ndarray:
        if self.is_arc[i]:
            phi = self.phi0[i] + t * self.sweep[i]
            return self.c[i] + self.R[i] * np.array([math.cos(phi), math.sin(phi)])
        return self.a[i] + t * self.d[i]

    def length(self, i: int) -> float:
        if self.is_arc[i]:
            return float(self.R[i] * abs(self.sweep[i]))
        return float(math.hypot(*self.d[i]))

    def inner_normal(self, i: int, t: float) -> np.ndarray:
        """Unit normal pointing into the set (the set lies left of each edge)."""
        if self.is_arc[i]:
            phi = self.phi0[i] + t * self.sweep[i]
            s = math.copysign(1.0, self.sweep[i])
            return s * np.array([-math.cos(phi), -math.sin(phi)])
        dx, dy = self.d[i]
        ln = math.hypot(dx, dy)
        return np.array([-dy / ln, dx / ln])

    def inner_normals(self, edges, ts) -> np.ndarray:
        """Vectorised :meth:`inner_normal` for arrays of edge indices and parameters."""
        edges = np.asarray(edges, dtype=int)
        ts = np.asarray(ts, dtype=float)
        d = self.d[edges]
        ln = np.hypot(d[:, 0], d[:, 1])
        ln = np.where(ln > 0, ln, 1.0)
        out = np.stack([-d[:, 1] / ln, d[:, 0] / ln], axis=1)
        arc = self.is_arc[edges]
        if np.any(arc):
            phi = self.phi0[edges[arc]] + ts[arc] * self.sweep[edges[arc]]
            s = np.copysign(1.0, self.sweep[edges[arc]])
            out[arc] = -s[:, None] * np.stack([np.cos(phi), np.sin(phi)], axis=1)
        return out

    def arc_param(self, i: int, phi):
        """Edge parameter of the arc point at center-angle ``phi`` (may exceed [0, 1])."""
        sw = self.sweep[i]
        off = np.mod((np.asarray(phi) - self.phi0[i]) * math.copysign(1.0, sw), TWO_PI)
        t = off / abs(sw)
        # the end vertex of a non-closed arc maps to off ~ |sw|
        return np.where((t > 1.0) & (np.abs(off - TWO_PI) < 1e-12), 0.0, t)

    # winding -------------------------------------------------------------
    def winding(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        out = np.empty(len(pts), dtype=int)
        chunk = max(1, 200_000 // max(self.m, 1))
        for s in range(0, len(pts), chunk):
            out[s : s + chunk] = self._winding(pts[s : s + chunk])
        return out

    def _winding(self, p: np.ndarray) -> np.ndarray:
        ax = self.a[None, :, 0] - p[:, None, 0]
        ay = self.a[None, :, 1] - p[:, None, 1]
        bx = self.b[None, :, 0] - p[:, None, 0]
        by = self.b[None, :, 1] - p[:, None, 1]
        ang = np.arctan2(ax * by - ay * bx, ax * bx + ay * by)
        if self.is_arc.any():
            idx = np.nonzero(self.is_arc)[0]
            c = self.c[idx]
            R = self.R[idx]
            sw = self.sweep[idx]
            a = self.a[idx]
            dch = self.d[idx]
            mid_phi = self.phi0[idx] + 0.5 * sw
            m = c + R[:, None] * np.stack([np.cos(mid_phi), np.sin(mid_phi)], axis=1)
            dist2 = (p[:, None, 0] - c[None, :, 0]) ** 2 + (p[:, None, 1] - c[None, :, 1]) ** 2
            in_disk = dist2 < (R**2)[None, :]
            s_m = dch[:, 0] * (m[:, 1] - a[:, 1]) - dch[:, 1] * (m[:, 0] - a[:, 0])
            s_p = dch[None, :, 0] * (p[:, None, 1] - a[None, :, 1]) - dch[None, :, 1] * (
                p[:, None, 0] - a[None, :, 0]
            )
            full = np.abs(sw) >= TWO_PI - 1e-12
            in_seg = in_disk & ((s_p * s_m[None, :] > 0) | full[None, :])
            ang[:, idx] += np.where(in_seg, np.sign(sw)[None, :] * TWO_PI, 0.0)
        return np.rint(ang.sum(axis=1) / TWO_PI).astype(int)

    # intersections --------------------------------------------------------
    def circle_crossings(self, radii):
        """Intersections of every edge with the circles |x| = r.

        Returns ``(angles, points_x, points_y, edge, t)``; the first, second,
        third and fifth have shape ``(n_r, 2m)`` with NaN where there is no
        crossing, ``edge`` has shape ``(2m,)``.
        """
        r = np.atleast_1d(np.asarray(radii, dtype=float))[:, None]
        m = self.m
        T = np.full((len(r), 2 * m), np.nan)
        PX = np.full_like(T, np.nan)
        PY = np.full_like(T, np.nan)
        edge = np.repeat(np.arange(m), 2)
        seg = np.nonzero(~self.is_arc)[0]
        if len(seg):
            a, d = self.a[seg], self.d[seg]
            A = (d * d).sum(axis=1)[None, :]
            B = 2.0 * (a * d).sum(axis=1)[None, :]
            C = (a * a).sum(axis=1)[None, :] - r**2
            disc = B * B - 4.0 * A * C
            ok = disc >= 0.0
            sq = np.sqrt(np.where(ok, disc, 0.0))
            for k, sgn in enumerate((-1.0, 1.0)):
                t = (-B + sgn * sq) / (2.0 * A)
                good = ok & (t >= -_T_EPS) & (t <= 1.0 + _T_EPS)
                t = np.clip(t, 0.0, 1.0)
                cols = 2 * seg + k
                T[:, cols] = np.where(good, t, np.nan)
                PX[:, cols] = np.where(good, a[None, :, 0] + t * d[None, :, 0], np.nan)
                PY[:, cols] = np.where(good, a[None, :, 1] + t * d[None, :, 1], np.nan)
        for i in np.nonzero(self.is_arc)[0]:
            cx, cy = self.c[i]
            D = math.hypot(cx, cy)
            if D == 0.0:
                continue  # concentric arc: meets |x| = r only on a null set of radii
            R = self.R[i]
            rr = r[:, 0]
            along = (rr**2 - R**2 + D**2) / (2.0 * D)
            h2 = rr**2 - along**2
            ok = h2 >= 0.0
            h = np.sqrt(np.where(ok, h2, 0.0))
            ux, uy = cx / D, cy / D
            for k, sgn in enumerate((-1.0, 1.0)):
                px = along * ux - sgn * h * uy
                py = along * uy + sgn * h * ux
                t = self.arc_param(i, np.arctan2(py - cy, px - cx))
                good = ok & (t <= 1.0 + _T_EPS)
                t = np.clip(t, 0.0, 1.0)
                col = 2 * i + k
                T[:, col] = np.where(good, t, np.nan)
                PX[:, col] = np.where(good, px, np.nan)
                PY[:, col] = np.where(good, py, np.nan)
        ang = np.arctan2(PY, PX)
        return ang, PX, PY, edge, T

    def line_crossings(self, xs):
        """Intersections of every edge with vertical lines x = const.

        Returns ``(ys, edge, t)`` shaped like :meth:`circle_crossings`.
        """
        x = np.atleast_1d(np.asarray(xs, dtype=float))[:, None]
        m = self.m
        T = np.full((len(x), 2 * m), np.nan)
        Y = np.full_like(T, np.nan)
        edge = np.repeat(np.arange(m), 2)
        seg = np.nonzero(~self.is_arc & (self.d[:, 0] != 0.0))[0]
        if len(seg):
            a, d = self.a[seg], self.d[seg]
            t = (x - a[None, :, 0]) / d[None, :, 0]
            good = (t >= -_T_EPS) & (t <= 1.0 + _T_EPS)
            t = np.clip(t, 0.0, 1.0)
            T[:, 2 * seg] = np.where(good, t, np.nan)
            Y[:, 2 * seg] = np.where(good, a[None, :, 1] + t * d[None, :, 1], np.nan)
        for i in np.nonzero(self.is_arc)[0]:
            cx, cy = self.c[i]
            R = self.R[i]
            cosv = (x[:, 0] - cx) / R
            ok = np.abs(cosv) <= 1.0
            base = np.arccos(np.clip(cosv, -1.0, 1.0))
            for k, sgn in enumerate((1.0, -1.0)):
                phi = sgn * base
                t = self.arc_param(i, phi)
                good = ok & (t <= 1.0 + _T_EPS)
                col = 2 * i + k
                T[:, col] = np.where(good, np.clip(t, 0.0, 1.0), np.nan)
                Y[:, col] = np.where(good, cy + R * np.sin(phi), np.nan)
        return Y, edge, T

    # level-set splitting ---------------------------------------------------
    def level_params(self, i: int, kind: str, level: float) -> list[float]:
        """Edge parameters where |x| (kind='radial') or x_1 (kind='x') equals ``level``."""
        out = []
        if not self.is_arc[i]:
            a, d = self.a[i], self.d[i]
            if kind == "radial":
                A = float(d @ d)
                B = 2.0 * float(a @ d)
                C = float(a @ a) - level * level
                disc = B * B - 4 * A * C
                if disc >= 0:
                    sq = math.sqrt(disc)
                    out += [(-B - sq) / (2 * A), (-B + sq) / (2 * A)]
            elif d[0] != 0.0:
                out.append((level - a[0]) / d[0])
        else:
            cx, cy = self.c[i]
            R = self.R[i]
            if kind == "radial":
                D = math.hypot(cx, cy)
                if D > 0:
                    v = (level * level - D * D - R * R) / (2 * R * D)
                    if abs(v) <= 1.0:
                        pc = math.atan2(cy, cx)
                        w = math.acos(v)
                        out += list(self.arc_param(i, np.array([pc + w, pc - w])))
            else:
                v = (level - cx) / R
                if abs(v) <= 1.0:
                    w = math.acos(v)
                    out += list(self.arc_param(i, np.array([w, -w])))
        return [float(t) for t in out if 0.0 < t < 1.0]

    def monotone_params(self, i: int, kind: str) -> list[float]:
        """Interior parameters where the level function has a critical point."""
        out = []
        if not self.is_arc[i]:
            if kind == "radial":
                a, d = self.a[i], self.d[i]
                out.append(-float(a @ d) / float(d @ d))
        else:
            cx, cy = self.c[i]
            if kind == "radial":
                if cx != 0.0 or cy != 0.0:
                    pc = math.atan2(cy, cx)
                    out += list(self.arc_param(i, np.array([pc, pc + math.pi])))
            else:
                out += list(self.arc_param(i, np.array([0.0, math.pi])))
        return [float(t) for t in out if 0.0 < t < 1.0]

    def pieces(self, i: int, kind: str, levels: Sequence[float]):
        """Split edge ``i`` into pieces on which the level function is monotone
        and does not cross any of ``levels``.  Yields ``(t0, t1, length)``."""
        ts = {0.0, 1.0}
        ts.update(self.monotone_params(i, kind))
        for lv in levels:
            ts.update(self.level_params(i, kind, lv))
        ts = sorted(ts)
        L = self.length(i)
        for t0, t1 in zip(ts[:-1], ts[1:]):
            if t1 - t0 > 0:
                yield t0, t1, L * (t1 - t0)

    def is_concentric(self, i: int) -> bool:
        return bool(self.is_arc[i] and self.c[i, 0] == 0.0 and self.c[i, 1] == 0.0)


def _ring_area(ring: Ring) -> float:
    et = EdgeTable([ring])
    area = 0.5 * float(np.sum(et.a[:, 0] * et.b[:, 1] - et.a[:, 1] * et.b[:, 0]))
    for i in np.nonzero(et.is_arc)[0]:
        sw = et.sweep[i]
        area += 0.5 * et.R[i] ** 2 * (sw - math.sin(sw))
    return area


def _polyline(et: EdgeTable):
    """Chord approximation of the boundary used only for simplicity checks."""
    segs = []
    for i in range(et.m):
        if et.is_arc[i]:
            n = max(4, int(math.ceil(abs(et.sweep[i]) / (math.pi / 32))))
            pts = [et.point(i, k / n) for k in range(n + 1)]
        else:
            pts = [et.a[i], et.b[i]]
        for p, q in zip(pts[:-1], pts[1:]):
            segs.append((p[0], p[1], q[0], q[1], et.ring[i]))
    return np.array(segs, dtype=float)


def _check_simple(et: EdgeTable):
    s = _polyline(et)
    if len(s) < 2:
        return
    p, q = s[:, 0:2], s[:, 2:4]

    def orient(a, b, c):
        return (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - (b[..., 1] - a[..., 1]) * (
            c[..., 0] - a[..., 0]
        )

    P1, Q1 = p[:, None, :], q[:, None, :]
    P2, Q2 = p[None, :, :], q[None, :, :]
    o1 = orient(P1, Q1, P2)
    o2 = orient(P1, Q1, Q2)
    o3 = orient(P2, Q2, P1)
    o4 = orient(P2, Q2, Q1)
    scale = 1e-12 * max(1.0, float(np.abs(s[:, :4]).max()) ** 2)
    proper = (o1 * o2 < -scale) & (o3 * o4 < -scale)
    np.fill_diagonal(proper, False)
    if proper.any():
        i, j = np.argwhere(proper)[0]
        raise GeometryError(f"boundary self-intersection between pieces {i} and {j}")


@dataclass(frozen=True)
class PolygonSet:
    """A bounded planar set whose boundary is a union of simple rings.

    >>> sq = PolygonSet([Ring(((0, 0), (1, 0), (1, 1), (0, 1)))])
    >>> round(sq.area, 12)
    1.0
    """

    rings: tuple[Ring, ...]

    def __post_init__(self):
        rings = tuple(self.rings)
        if not rings:
            raise GeometryError("a polygon set needs at least one ring")
        fixed = []
        for ring in rings:
            a = _ring_area(ring)
            if a == 0.0:
                raise GeometryError("ring encloses zero area")
            if (ring.orientation == "outer") != (a > 0):
                ring = ring.reversed()
            fixed.append(ring)
        object.__setattr__(self, "rings", tuple(fixed))
        et = self.edges
        _check_simple(et)
        outers = [r for r in fixed if r.orientation == "outer"]
        if not outers:
            raise GeometryError("no outer ring")
        for ring in fixed:
            if ring.orientation != "hole":
                continue
            probe = np.array([EdgeTable([ring]).point(0, 0.5)])
            n_in = sum(int(EdgeTable([o]).winding(probe)[0] != 0) for o in outers)
            if n_in != 1:
                raise GeometryError("every hole must lie inside exactly one outer ring")
        if not self.area > 0:
            raise GeometryError("represented region must have positive area")

    @cached_property
    def edges(self) -> EdgeTable:
        return EdgeTable(self.rings)

    @property
    def area(self) -> float:
        return math.fsum(_ring_area(r) for r in self.rings)

    @property
    def perimeter(self) -> float:
        et = self.edges
        return math.fsum(et.length(i) for i in range(et.m))

    def contains(self, pts) -> np.ndarray:
        return self.edges.winding(pts) != 0

    def max_radius(self) -> float:
        """Largest |x| over the boundary."""
        et = self.edges
        best = float(np.max(np.hypot(et.a[:, 0], et.a[:, 1])))
        for i in range(et.m):
            for t in et.monotone_params(i, "radial"):
                best = max(best, float(np.hypot(*et.point(i, t))))
        return best

    def x_range(self) -> tuple[float, float]:
        et = self.edges
        lo, hi = float(et.a[:, 0].min()), float(et.a[:, 0].max())
        for i in range(et.m):
            for t in et.monotone_params(i, "x"):
                x = float(et.point(i, t)[0])
                lo, hi = min(lo, x), max(hi, x)
        return lo, hi

    def critical_radii(self) -> list[float]:
        """Radii of vertices and of tangencies between circles |x| = r and edges."""
        et = self.edges
        out = set(float(v) for v in np.hypot(et.a[:, 0], et.a[:, 1]))
        for i in range(et.m):
            for t in et.monotone_params(i, "radial"):
                out.add(float(np.hypot(*et.point(i, t))))
        return sorted(out)

    def jump_coordinates(self, kind: str = "radial") -> list[float]:
        """Levels where slice measures can jump: radii of arcs centred at the
        origin (``kind='radial'``) or abscissae of vertical segments (``'x'``)."""
        et = self.edges
        out = set()
        for i in range(et.m):
            if kind == "radial" and et.is_concentric(i):
                out.add(float(et.R[i]))
            elif kind == "x" and not et.is_arc[i] and et.d[i, 0] == 0.0:
                out.add(float(et.a[i, 0]))
        return sorted(out)

