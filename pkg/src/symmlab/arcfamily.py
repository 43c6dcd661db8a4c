"""Analytic sets whose circular slices are single arcs.

The slice of an :class:`ArcFamilySet` at ``(r, z)`` is the arc of angular
width ``xi(r, z)`` centred at ``theta_c(r, z)``.  Fields are small objects
with ``__call__(r, z)`` and ``grad(r, z) -> (d/dr, d/dz)`` that work on
numpy arrays; ``z`` is ignored (zeros) for planar sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .grid import GridSpec
from .sets import TWO_PI, AngularArcSet, GeometryError


class BuiltinField:
    """Closed-form scalar field of ``(r, z)`` given by a name and parameters."""

    kinds = {
        "constant": ("value",),
        "affine": ("c0", "cr", "cz"),
        "sin_profile": ("a", "b"),
    }

    def __init__(self, kind: str, **params):
        if kind not in self.kinds:
            raise ValueError(f"unknown builtin field {kind!r}")
        self.kind = kind
        self.params = {k: float(params.get(k, 0.0)) for k in self.kinds[kind]}

    def __call__(self, r, z=None):
        r = np.asarray(r, dtype=float)
        z = np.zeros_like(r) if z is None else np.asarray(z, dtype=float)
        p = self.params
        if self.kind == "constant":
            return np.full(np.broadcast(r, z).shape, p["value"])
        if self.kind == "affine":
            return p["c0"] + p["cr"] * r + p["cz"] * z
        return p["a"] + p["b"] * np.sin(r) + 0.0 * z

    def grad(self, r, z=None):
        r = np.asarray(r, dtype=float)
        z = np.zeros_like(r) if z is None else np.asarray(z, dtype=float)
        shape = np.broadcast(r, z).shape
        p = self.params
        if self.kind == "constant":
            return np.zeros(shape), np.zeros(shape)
        if self.kind == "affine":
            return np.full(shape, p["cr"]), np.full(shape, p["cz"])
        return p["b"] * np.cos(r) + 0.0 * z, np.zeros(shape)

    def lipschitz(self, domain) -> float:
        p = self.params
        if self.kind == "constant":
            return 0.0
        if self.kind == "affine":
            return math.hypot(p["cr"], p["cz"])
        return abs(p["b"])

    def walls(self):
        return []

    def to_json(self) -> dict:
        return {"builtin": self.kind, **self.params}

    def __eq__(self, other):
        return isinstance(other, BuiltinField) and (self.kind, self.params) == (other.kind, other.params)


class InterpolatedField:
    """Piecewise-(bi)linear interpolant of cell-centre values.

    Interfaces flagged as jumps are not interpolated across: on each side the
    value is extrapolated from the cell centre with the one-sided slope
    supplied, so the field has a wall there.
    """

    def __init__(self, grid: GridSpec, values, jumps=None, slopes_left=None, slopes_right=None):
        self.grid = grid
        self.values = np.asarray(values, dtype=float).reshape(grid.shape)
        d = grid.dim
        if jumps is None:
            jumps = [None] * d
        self.jumps, self.gl, self.gr = [], [], []
        for ax in range(d):
            shp = list(grid.shape)
            shp[ax] -= 1
            j = np.zeros(shp, bool) if jumps[ax] is None else np.asarray(jumps[ax], bool).reshape(shp)
            gl = np.zeros(shp) if slopes_left is None or slopes_left[ax] is None else np.asarray(slopes_left[ax], float).reshape(shp)
            gr = np.zeros(shp) if slopes_right is None or slopes_right[ax] is None else np.asarray(slopes_right[ax], float).reshape(shp)
            self.jumps.append(j)
            self.gl.append(np.where(j, gl, 0.0))
            self.gr.append(np.where(j, gr, 0.0))

    # 1-D interpolation along axis 0 for a batch of rows ------------------
    def _interp_axis(self, ax, x, rows, vals_fn):
        """Interpolate along ``ax`` at coordinates ``x``.

        ``vals_fn(i)`` returns the values at centre index ``i`` (arrays
        aligned with ``x``); ``rows`` selects the jump flags for the other
        axis.  Returns value and derivative.
        """
        lo = self.grid.domain[ax][0]
        h = self.grid.spacing[ax]
        n = self.grid.shape[ax]
        s = (x - lo) / h - 0.5
        i = np.clip(np.floor(s).astype(int), 0, max(n - 2, 0))
        if n == 1:
            v = vals_fn(np.zeros_like(i))
            return v, np.zeros_like(v)
        w = s - i
        v0, v1 = vals_fn(i), vals_fn(i + 1)
        below, above = s < 0, s > n - 1
        lin = v0 + (v1 - v0) * np.clip(w, 0.0, 1.0)
        dlin = np.where(below | above, 0.0, (v1 - v0) / h)
        jmp = rows(self.jumps[ax], i)
        gl, gr = rows(self.gl[ax], i), rows(self.gr[ax], i)
        left = w < 0.5
        vj = np.where(left, v0 + gl * w * h, v1 - gr * (1.0 - w) * h)
        dj = np.where(left, gl, gr)
        val = np.where(jmp & ~below & ~above, vj, lin)
        der = np.where(jmp & ~below & ~above, dj, dlin)
        return val, der

    def _eval(self, r, z):
        r = np.asarray(r, dtype=float)
        if self.grid.dim == 1:
            vals = self.values

            def rows(arr, i):
                return arr[i]

            v, dv = self._interp_axis(0, r, rows, lambda i: vals[i])
            return v, dv, np.zeros_like(v)
        z = np.asarray(z, dtype=float)
        r, z = np.broadcast_arrays(r, z)
        hz = self.grid.spacing[1]
        zlo = self.grid.domain[1][0]
        nz = self.grid.shape[1]
        sz = (z - zlo) / hz - 0.5
        j = np.clip(np.floor(sz).astype(int), 0, max(nz - 2, 0))
        if nz == 1:
            j1 = j
        else:
            j1 = j + 1
        out = []
        for jj in (j, j1):
            v, dv = self._interp_axis(
                0, r, lambda arr, i, jj=jj: arr[i, jj], lambda i, jj=jj: self.values[i, jj]
            )
            out.append((v, dv))
        (f0, d0), (f1, d1) = out
        if nz == 1:
            return f0, d0, np.zeros_like(f0)
        wz = np.clip(sz - j, 0.0, 1.0)
        # z-jumps: look at the column nearest in r
        ri = np.clip(
            np.rint((r - self.grid.domain[0][0]) / self.grid.spacing[0] - 0.5).astype(int),
            0,
            self.grid.shape[0] - 1,
        )
        jmp = self.jumps[1][ri, j]
        gl, gr = self.gl[1][ri, j], self.gr[1][ri, j]
        outside = (sz < 0) | (sz > nz - 1)
        left = wz < 0.5
        f = np.where(
            jmp & ~outside,
            np.where(left, f0 + gl * wz * hz, f1 - gr * (1 - wz) * hz),
            f0 + (f1 - f0) * wz,
        )
        fr = np.where(jmp & ~outside, np.where(left, d0, d1), d0 + (d1 - d0) * wz)
        fz = np.where(
            jmp & ~outside, np.where(left, gl, gr), np.where(outside, 0.0, (f1 - f0) / hz)
        )
        return f, fr, fz

    def __call__(self, r, z=None):
        return self._eval(r, z)[0]

    def grad(self, r, z=None):
        _, fr, fz = self._eval(r, z)
        return fr, fz

    def lipschitz(self, domain) -> float:
        best = 0.0
        for ax in range(self.grid.dim):
            dv = np.diff(self.values, axis=ax) / self.grid.spacing[ax]
            dv = np.where(self.jumps[ax], 0.0, dv)
            cand = [np.abs(dv).max(initial=0.0), np.abs(self.gl[ax]).max(initial=0.0), np.abs(self.gr[ax]).max(initial=0.0)]
            best = max(best, *map(float, cand))
        return best * math.sqrt(self.grid.dim)

    def walls(self):
        """Wall pieces ``(axis, location, (lo, hi) of the other axis or None, height)``."""
        out = []
        g = self.grid
        for ax in range(g.dim):
            idx = np.argwhere(self.jumps[ax])
            h = g.spacing[ax]
            for ij in idx:
                ij = tuple(int(t) for t in ij)
                i = ij[ax]
                loc = g.domain[ax][0] + (i + 1) * h
                nxt = list(ij)
                nxt[ax] += 1
                left = self.values[ij] + self.gl[ax][ij] * 0.5 * h
                right = self.values[tuple(nxt)] - self.gr[ax][ij] * 0.5 * h
                span = None
                if g.dim == 2:
                    o = 1 - ax
                    c = g.centers(o)[ij[o]]
                    ho = g.spacing[o]
                    span = (c - 0.5 * ho, c + 0.5 * ho)
                out.append((ax, loc, span, right - left))
        return out

    def to_json(self) -> dict:
        d = {"grid": self.grid.to_json(), "values": self.values.tolist()}
        d["jumps"] = [j.tolist() for j in self.jumps]
        d["slopes_left"] = [g.tolist() for g in self.gl]
        d["slopes_right"] = [g.tolist() for g in self.gr]
        return d

    def __eq__(self, other):
        return (
            isinstance(other, InterpolatedField)
            and self.grid == other.grid
            and np.array_equal(self.values, other.values)
            and all(np.array_equal(a, b) for a, b in zip(self.jumps, other.jumps))
            and all(np.array_equal(a, b) for a, b in zip(self.gl, other.gl))
            and all(np.array_equal(a, b) for a, b in zip(self.gr, other.gr))
        )


def field_from_json(d: dict):
    if "builtin" in d:
        params = {k: v for k, v in d.items() if k != "builtin"}
        return BuiltinField(d["builtin"], **params)
    if "grid" in d:
        return InterpolatedField(
            GridSpec.from_json(d["grid"]),
            d["values"],
            d.get("jumps"),
            d.get("slopes_left"),
            d.get("slopes_right"),
        )
    raise ValueError(f"unrecognised field description {d!r}")


@dataclass(frozen=True, eq=False)
class ArcFamilySet:
    """Set whose slice at ``(r, z)`` is ``{theta : |theta - theta_c| < xi/2}``."""

    domain: tuple[tuple[float, float], ...]
    xi: object
    theta_c: object = None
    lipschitz_bound: Optional[float] = None

    def __post_init__(self):
        dom = tuple((float(a), float(b)) for a, b in self.domain)
        if len(dom) not in (1, 2):
            raise GeometryError("arc families live in k = 2 or k = 3")
        if not dom[0][0] >= 0:
            raise GeometryError("arc family domain needs r_min >= 0")
        for lo, hi in dom:
            if not hi > lo:
                raise GeometryError("degenerate arc family domain")
        object.__setattr__(self, "domain", dom)
        if self.theta_c is None:
            object.__setattr__(self, "theta_c", BuiltinField("constant", value=0.0))
        if self.lipschitz_bound is None:
            lb = max(self.xi.lipschitz(dom), self.theta_c.lipschitz(dom))
            object.__setattr__(self, "lipschitz_bound", lb)

    @property
    def k(self) -> int:
        return len(self.domain) + 1

    def inside_domain(self, r, z=None):
        r = np.asarray(r, dtype=float)
        ok = (r >= self.domain[0][0]) & (r <= self.domain[0][1])
        if self.k == 3:
            z = np.asarray(z, dtype=float)
            ok = ok & (z >= self.domain[1][0]) & (z <= self.domain[1][1])
        return ok

    def xi_at(self, r, z=None):
        zz = None if self.k == 2 else z
        val = np.clip(self.xi(r, zz), 0.0, TWO_PI)
        return np.where(self.inside_domain(r, z), val, 0.0)

    def center_at(self, r, z=None):
        return self.theta_c(r, None if self.k == 2 else z)

    def slice(self, r: float, z: float | None = None) -> AngularArcSet:
        w = float(self.xi_at(r, z))
        c = float(self.center_at(r, z))
        if w >= TWO_PI:
            return AngularArcSet.full_circle(r)
        return AngularArcSet(r, ((c - 0.5 * w, c + 0.5 * w),))

    def contains(self, pts) -> np.ndarray:
        """Membership of points of R^k (rows)."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        r = np.hypot(pts[:, 0], pts[:, 1])
        theta = np.arctan2(pts[:, 1], pts[:, 0])
        z = pts[:, 2] if self.k == 3 else None
        w = self.xi_at(r, z)
        c = self.center_at(r, z)
        off = np.abs(np.mod(theta - c + math.pi, TWO_PI) - math.pi)
        return (r > 0) & ((off < 0.5 * w) | (w >= TWO_PI))

    def walls(self):
        return self.xi.walls()

    def to_json(self) -> dict:
        dom = {"r": list(self.domain[0])}
        if self.k == 3:
            dom["z"] = list(self.domain[1])
        return {
            "kind": "arc_family",
            "domain": dom,
            "xi": self.xi.to_json(),
            "theta_c": self.theta_c.to_json(),
            "lipschitz_bound": self.lipschitz_bound,
        }

    def __eq__(self, other):
        return (
            isinstance(other, ArcFamilySet)
            and self.domain == other.domain
            and self.xi == other.xi
            and self.theta_c == other.theta_c
            and self.lipschitz_bound == other.lipschitz_bound
        )
