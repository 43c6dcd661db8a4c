"""Boxes, uniform cell-centred grids and the functions sampled on them."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .sets import AngularArcSet, IntervalSet

FACE_EPS = 1e-9  # relative to the grid spacing when matching faces to interfaces


class RegionError(ValueError):
    """Raised when a region is malformed or falls outside a domain."""


@dataclass(frozen=True)
class Box:
    """Axis-aligned box with per-face closure.

    ``closed[a] = (lo_closed, hi_closed)``; the default is half-open
    ``[lo, hi)`` on every axis so that boxes tile without double counting.
    """

    bounds: tuple[tuple[float, float], ...]
    closed: Optional[tuple[tuple[bool, bool], ...]] = None

    def __post_init__(self):
        bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        for lo, hi in bounds:
            if not hi > lo:
                raise RegionError(f"empty box side ({lo}, {hi})")
        object.__setattr__(self, "bounds", bounds)
        closed = self.closed
        if closed is None:
            closed = ((True, False),) * len(bounds)
        closed = tuple((bool(a), bool(b)) for a, b in closed)
        if len(closed) != len(bounds):
            raise RegionError("closure flags must match the box dimension")
        object.__setattr__(self, "closed", closed)

    @property
    def dim(self) -> int:
        return len(self.bounds)

    @property
    def volume(self) -> float:
        return math.prod(hi - lo for lo, hi in self.bounds)

    def with_closure(self, spec: str) -> "Box":
        flags = {"closed": (True, True), "open": (False, False), "halfopen": (True, False)}
        if spec not in flags:
            raise RegionError(f"unknown closure {spec!r}")
        return Box(self.bounds, (flags[spec],) * self.dim)

    def contains_coord(self, axis: int, x, tol: float = 0.0):
        """Membership of coordinates along one axis, honouring face closure."""
        lo, hi = self.bounds[axis]
        clo, chi = self.closed[axis]
        x = np.asarray(x, dtype=float)
        inside = (x > lo + tol) & (x < hi - tol)
        on_lo = np.abs(x - lo) <= tol
        on_hi = np.abs(x - hi) <= tol
        return inside | (on_lo & clo) | (on_hi & chi)

    def interior(self) -> "Box":
        return Box(self.bounds, ((False, False),) * self.dim)

    @classmethod
    def parse(cls, text: str, axes: Sequence[str] = ("r", "z")) -> "Box":
        """Parse ``"r:[1,2],z:(0,1)"``; brackets give closure."""
        pat = re.compile(r"\s*(\w+)\s*:\s*([\[\(])\s*([^,\]\)]+)\s*,\s*([^\]\)]+?)\s*([\]\)])")
        found = {}
        pos = 0
        text = text.strip()
        while pos < len(text):
            m = pat.match(text, pos)
            if not m:
                raise RegionError(f"cannot parse region {text!r}")
            name, lb, lo, hi, rb = m.groups()
            found[name] = ((float(lo), float(hi)), (lb == "[", rb == "]"))
            pos = m.end()
            while pos < len(text) and text[pos] in ", ":
                pos += 1
        names = [a for a in axes if a in found]
        if not names or set(found) - set(axes):
            raise RegionError(f"region axes must be among {tuple(axes)}, got {tuple(found)}")
        if names != list(axes[: len(names)]):
            raise RegionError("region axes must be given in order")
        return cls(tuple(found[a][0] for a in names), tuple(found[a][1] for a in names))

    def format(self, axes: Sequence[str] = ("r", "z")) -> str:
        parts = []
        for name, (lo, hi), (cl, ch) in zip(axes, self.bounds, self.closed):
            parts.append(f"{name}:{'[' if cl else '('}{lo!r},{hi!r}{']' if ch else ')'}")
        return ",".join(parts)


def _fit_count(lo: float, hi: float, n: int, feats) -> int:
    """Smallest count in ``[n, 2n)`` putting every feature on the lattice ``lo + k h``."""
    L = hi - lo
    for m in range(n, 2 * n):
        h = L / m
        if all(abs((f - lo) / h - round((f - lo) / h)) < 1e-7 for f in feats):
            return m
    return n


@dataclass(frozen=True)
class GridSpec:
    """Uniform cell-centred grid on a box domain."""

    domain: tuple[tuple[float, float], ...]
    shape: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple((float(a), float(b)) for a, b in self.domain))
        object.__setattr__(self, "shape", tuple(int(n) for n in self.shape))
        if len(self.domain) != len(self.shape):
            raise RegionError("grid domain and shape disagree in dimension")
        for (lo, hi), n in zip(self.domain, self.shape):
            if not hi > lo or n < 1:
                raise RegionError("degenerate grid")

    @property
    def dim(self) -> int:
        return len(self.shape)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple((hi - lo) / n for (lo, hi), n in zip(self.domain, self.shape))

    @property
    def cell_volume(self) -> float:
        return math.prod(self.spacing)

    def centers(self, axis: int) -> np.ndarray:
        lo, _ = self.domain[axis]
        h = self.spacing[axis]
        return lo + (np.arange(self.shape[axis]) + 0.5) * h

    def interfaces(self, axis: int) -> np.ndarray:
        """Coordinates of the interior interfaces along one axis."""
        lo, _ = self.domain[axis]
        return lo + np.arange(1, self.shape[axis]) * self.spacing[axis]

    def mesh(self) -> tuple[np.ndarray, ...]:
        return np.meshgrid(*(self.centers(a) for a in range(self.dim)), indexing="ij")

    def refine(self, factor: int = 2) -> "GridSpec":
        return GridSpec(self.domain, tuple(n * factor for n in self.shape))

    @classmethod
    def aligned(
        cls,
        box: Box,
        n: Sequence[int] | int,
        pad: int | None = None,
        positive_axis0=True,
        features: Sequence[Sequence[float]] | None = None,
    ):
        """Grid whose interfaces fall on the faces of ``box`` with a margin of padding cells.

        ``features[a]`` lists coordinates along axis ``a`` (e.g. where the
        distribution jumps) that should also land on interfaces; the cell
        count is raised, by less than a factor of two, until they do when
        that is possible.  With ``positive_axis0`` the domain never extends
        below 0 along the first axis (circular radii).
        """
        if isinstance(n, int):
            n = (n,) * box.dim
        n = list(n)
        for ax, (lo, hi) in enumerate(box.bounds):
            feats = [] if features is None or ax >= len(features) else list(features[ax])
            feats = [f for f in feats if lo < f < hi]
            if feats:
                n[ax] = _fit_count(lo, hi, n[ax], feats)
        dom, shape = [], []
        for ax, ((lo, hi), m) in enumerate(zip(box.bounds, n)):
            h = (hi - lo) / m
            p = pad if pad is not None else max(2, m // 20)
            plo = p
            if ax == 0 and positive_axis0:
                plo = min(p, int(math.floor(lo / h + 1e-9)))
            dom.append((lo - plo * h, hi + p * h))
            shape.append(m + plo + p)
        return cls(tuple(dom), tuple(shape))

    def cell_mask(self, box: Box) -> np.ndarray:
        """Boolean array of cells whose centres lie in ``box``."""
        if box.dim != self.dim:
            raise RegionError("box and grid dimension differ")
        for (lo, hi), (dlo, dhi), h in zip(box.bounds, self.domain, self.spacing):
            if lo < dlo - FACE_EPS * h or hi > dhi + FACE_EPS * h:
                raise RegionError(f"box side ({lo}, {hi}) outside domain ({dlo}, {dhi})")
        masks = [box.contains_coord(a, self.centers(a)) for a in range(self.dim)]
        out = masks[0]
        for m in masks[1:]:
            out = np.multiply.outer(out, m)
        return out

    def to_json(self) -> dict:
        return {"domain": [list(iv) for iv in self.domain], "shape": list(self.shape)}

    @classmethod
    def from_json(cls, d: dict) -> "GridSpec":
        return cls(tuple(tuple(iv) for iv in d["domain"]), tuple(d["shape"]))


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Scalar values at cell centres.  ``quantity`` is 'mu', 'xi' or 'v'."""

    grid: GridSpec
    values: np.ndarray
    mode: str = "circular"
    quantity: str = "mu"

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float).reshape(self.grid.shape)
        if not np.all(np.isfinite(vals)):
            raise ValueError("grid function has non-finite values")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if self.mode not in ("circular", "steiner"):
            raise ValueError(f"unknown mode {self.mode!r}")

    def __eq__(self, other):
        return (
            isinstance(other, GridFunction)
            and self.grid == other.grid
            and self.mode == other.mode
            and self.quantity == other.quantity
            and np.array_equal(self.values, other.values)
        )

    def radii(self) -> np.ndarray:
        """Cell-centre radii broadcast to the grid shape (circular mode)."""
        r = self.grid.centers(0)
        return r.reshape((-1,) + (1,) * (self.grid.dim - 1)) * np.ones(self.grid.shape)

    def to_csv(self, digits: Optional[int] = None) -> str:
        """CSV with cell-centre coordinates; values exact (``repr``) or to ``digits`` significant digits."""
        fmt = (lambda v: repr(float(v))) if not digits else (lambda v: f"{float(v):.{digits}g}")
        lines = []
        if self.grid.dim == 1:
            head = ("r," if self.mode == "circular" else "x,") + self.quantity
            lines.append(head)
            for x, v in zip(self.grid.centers(0), self.values):
                lines.append(f"{float(x)!r},{fmt(v)}")
        else:
            head = ("r,z," if self.mode == "circular" else "x1,x2,") + self.quantity
            lines.append(head)
            xs, zs = self.grid.centers(0), self.grid.centers(1)
            for i, x in enumerate(xs):
                for j, z in enumerate(zs):
                    lines.append(f"{float(x)!r},{float(z)!r},{fmt(self.values[i, j])}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True, eq=False)
class SliceGrid:
    """Per-cell slices sampled at cell centres: arcs (circular) or intervals (steiner)."""

    grid: GridSpec
    cells: np.ndarray  # object array of AngularArcSet / IntervalSet
    mode: str = "circular"

    def __post_init__(self):
        cells = np.asarray(self.cells, dtype=object).reshape(self.grid.shape)
        object.__setattr__(self, "cells", cells)
        if self.mode == "circular":
            r = self.grid.centers(0)
            if r.min() <= 0:
                raise ValueError("circular slice grids need positive cell radii")
            for idx, s in np.ndenumerate(cells):
                if not isinstance(s, AngularArcSet):
                    raise TypeError("circular slice grids hold AngularArcSet cells")
                if not math.isclose(s.radius, r[idx[0]], rel_tol=1e-12):
                    raise ValueError("cell slice radius differs from cell-centre radius")
        else:
            for s in cells.flat:
                if not isinstance(s, IntervalSet):
                    raise TypeError("steiner slice grids hold IntervalSet cells")

    def __eq__(self, other):
        return (
            isinstance(other, SliceGrid)
            and self.grid == other.grid
            and self.mode == other.mode
            and all(a == b for a, b in zip(self.cells.flat, other.cells.flat))
        )

    def measures(self) -> np.ndarray:
        out = np.empty(self.grid.shape)
        for idx, s in np.ndenumerate(self.cells):
            out[idx] = s.radius * s.width if self.mode == "circular" else s.measure
        return out
