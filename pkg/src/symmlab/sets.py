"""Slice-level value types: arcs on a circle, intervals on a line, circularised normals.

Angles live in (-pi, pi]; arcs are half-open ``(lo, hi]`` so that boolean
operations never double count endpoints.  An arc that crosses the negative
axis is stored split at pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi
MIN_WIDTH = 1e-12  # narrower pieces are dropped during normalisation


class GeometryError(ValueError):
    """Raised for malformed geometric input."""


def wrap_angle(theta: float) -> float:
    """Map an angle into (-pi, pi]."""
    t = math.fmod(theta + math.pi, TWO_PI)
    if t <= 0.0:
        t += TWO_PI
    return t - math.pi


def _merge(pieces: Iterable[tuple[float, float]]) -> list[tuple[float, float]]:
    out: list[tuple[float, float]] = []
    for lo, hi in sorted(pieces):
        if hi - lo < MIN_WIDTH:
            continue
        if out and lo <= out[-1][1]:
            if hi > out[-1][1]:
                out[-1] = (out[-1][0], hi)
        else:
            out.append((lo, hi))
    return out


def _combine(a: Sequence[tuple[float, float]], b: Sequence[tuple[float, float]], op: str):
    """Boolean combination of two merged interval lists by an endpoint sweep."""
    if op not in ("union", "intersection", "difference"):
        raise ValueError(f"unknown boolean op {op!r}")
    cuts = sorted({x for iv in list(a) + list(b) for x in iv})
    out = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        mid = 0.5 * (lo + hi)
        in_a = any(l < mid < h for l, h in a)
        in_b = any(l < mid < h for l, h in b)
        keep = {
            "union": in_a or in_b,
            "intersection": in_a and in_b,
            "difference": in_a and not in_b,
        }[op]
        if keep:
            out.append((lo, hi))
    return _merge(out)


@dataclass(frozen=True)
class AngularArcSet:
    """A finite union of arcs on the circle of the given radius.

    ``arcs`` may be given in any order and may wrap past pi; the stored value
    is normalised.  A full circle is kept as ``full=True`` with no arcs.
    """

    radius: float
    arcs: tuple[tuple[float, float], ...] = ()
    full: bool = False

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise GeometryError(f"arc set radius must be positive, got {self.radius}")
        if self.full:
            object.__setattr__(self, "arcs", ())
            return
        pieces = []
        for lo, hi in self.arcs:
            lo, hi = float(lo), float(hi)
            w = hi - lo
            if w < MIN_WIDTH:
                continue
            if w >= TWO_PI - MIN_WIDTH:
                object.__setattr__(self, "arcs", ())
                object.__setattr__(self, "full", True)
                return
            if -math.pi <= lo and hi <= math.pi:  # already normal: store exactly
                pieces.append((lo, hi))
                continue
            wl = wrap_angle(lo)
            if wl != lo:
                hi, lo = wl + w, wl
            if hi > math.pi:
                pieces.append((lo, math.pi))
                pieces.append((-math.pi, hi - TWO_PI))
            else:
                pieces.append((lo, hi))
        merged = _merge(pieces)
        if sum(h - l for l, h in merged) >= TWO_PI - MIN_WIDTH:
            object.__setattr__(self, "arcs", ())
            object.__setattr__(self, "full", True)
        else:
            object.__setattr__(self, "arcs", tuple(merged))

    @classmethod
    def empty_set(cls, radius: float) -> "AngularArcSet":
        return cls(radius)

    @classmethod
    def full_circle(cls, radius: float) -> "AngularArcSet":
        return cls(radius, full=True)

    @property
    def empty(self) -> bool:
        return not self.full and not self.arcs

    @property
    def width(self) -> float:
        """Total angular width in radians."""
        if self.full:
            return TWO_PI
        return math.fsum(h - l for l, h in self.arcs)

    def _intervals(self):
        return [(-math.pi, math.pi)] if self.full else list(self.arcs)

    @property
    def n_components(self) -> int:
        """Number of connected arcs on the circle (pieces split at pi count once)."""
        if self.full:
            return 1
        n = len(self.arcs)
        if n >= 2 and self.arcs[0][0] == -math.pi and self.arcs[-1][1] == math.pi:
            n -= 1
        return n

    def endpoints(self) -> list[float]:
        """Boundary angles of the set on the circle, in increasing order."""
        if self.full or self.empty:
            return []
        pts = []
        for lo, hi in self.arcs:
            pts.extend([lo, hi])
        if self.arcs[0][0] == -math.pi and self.arcs[-1][1] == math.pi and len(self.arcs) > 1:
            pts = pts[1:-1]
        return pts

    def contains(self, theta: float) -> bool:
        t = wrap_angle(theta)
        return any(lo < t <= hi for lo, hi in self._intervals())

    def union(self, other: "AngularArcSet") -> "AngularArcSet":
        return arcset_boolean(self, other, "union")

    def intersection(self, other: "AngularArcSet") -> "AngularArcSet":
        return arcset_boolean(self, other, "intersection")

    def difference(self, other: "AngularArcSet") -> "AngularArcSet":
        return arcset_boolean(self, other, "difference")

    def complement(self) -> "AngularArcSet":
        return arcset_boolean(AngularArcSet.full_circle(self.radius), self, "difference")


def arcset_measure(s: AngularArcSet) -> float:
    """One-dimensional Hausdorff measure of the arcs: radius times angular width."""
    return s.radius * s.width


def arcset_boolean(a: AngularArcSet, b: AngularArcSet, op: str) -> AngularArcSet:
    if not math.isclose(a.radius, b.radius, rel_tol=1e-12, abs_tol=0.0):
        raise GeometryError(f"radius mismatch: {a.radius} vs {b.radius}")
    res = _combine(a._intervals(), b._intervals(), op)
    return AngularArcSet(a.radius, tuple(res))


@dataclass(frozen=True)
class IntervalSet:
    """A finite union of bounded open intervals on the real line."""

    intervals: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        for lo, hi in self.intervals:
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise GeometryError("interval endpoints must be finite")
        object.__setattr__(
            self, "intervals", tuple(_merge((float(l), float(h)) for l, h in self.intervals))
        )

    @property
    def empty(self) -> bool:
        return not self.intervals

    @property
    def measure(self) -> float:
        return math.fsum(h - l for l, h in self.intervals)

    @property
    def n_components(self) -> int:
        return len(self.intervals)

    def endpoints(self) -> list[float]:
        return [x for iv in self.intervals for x in iv]

    def contains(self, y: float) -> bool:
        return any(lo < y < hi for lo, hi in self.intervals)

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(tuple(_combine(self.intervals, other.intervals, "union")))

    def intersection(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(tuple(_combine(self.intervals, other.intervals, "intersection")))

    def difference(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(tuple(_combine(self.intervals, other.intervals, "difference")))


@dataclass(frozen=True)
class CircNormal:
    """Circularised normal: radial part, tangential magnitude, vertical part."""

    radial: float
    tangential: float
    vertical: tuple[float, ...] = field(default=())

    def __post_init__(self):
        norm2 = self.radial**2 + self.tangential**2 + sum(v * v for v in self.vertical)
        if abs(norm2 - 1.0) > 1e-10:
            raise GeometryError(f"circularised normal is not unit length (|n|^2={norm2})")
        if self.tangential < 0:
            raise GeometryError("tangential magnitude must be non-negative")

    def as_array(self) -> np.ndarray:
        return np.array([self.radial, self.tangential, *self.vertical])


def normal_to_circ(nu, x) -> CircNormal:
    """Split a unit normal at a point of R^2_0 x R^{k-2} into its circularised parts."""
    nu = np.asarray(nu, dtype=float)
    x = np.asarray(x, dtype=float)[:2]
    rho = math.hypot(x[0], x[1])
    if rho == 0.0:
        raise GeometryError("normal_to_circ is undefined on the axis x = 0")
    if abs(float(np.dot(nu, nu)) - 1.0) > 1e-10:
        raise GeometryError("normal must be a unit vector")
    xh = x / rho
    radial = float(xh[0] * nu[0] + xh[1] * nu[1])
    # |nu_x - (xh.nu_x) xh| equals the component along the circle tangent
    tangential = abs(float(-xh[1] * nu[0] + xh[0] * nu[1]))
    return CircNormal(radial, tangential, tuple(float(v) for v in nu[2:]))
