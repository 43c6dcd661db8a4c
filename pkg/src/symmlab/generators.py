"""Built-in fixture sets.

Arcs are represented exactly by default; ``polygonize=True`` replaces each
circular arc by inscribed chords with sagitta at most ``chord_tol * R``.
"""

from __future__ import annotations

import math

import numpy as np

from .arcfamily import ArcFamilySet, BuiltinField
from .polygon import PolygonSet, Ring

DEFAULT_CHORD_TOL = 1e-4


def _pt(r, t):
    return (r * math.cos(t), r * math.sin(t))


def _chords(ring: Ring, chord_tol: float) -> Ring:
    """Replace arc edges by inscribed polylines."""
    verts = []
    n = ring.n_edges
    for i in range(n):
        p = ring.vertices[i]
        q = ring.vertices[(i + 1) % n]
        spec = ring.arcs[i]
        verts.append(p)
        if spec is None:
            continue
        cx, cy, ccw = spec
        R = math.hypot(p[0] - cx, p[1] - cy)
        p0 = math.atan2(p[1] - cy, p[0] - cx)
        p1 = math.atan2(q[1] - cy, q[0] - cx)
        sweep = (p1 - p0) % (2 * math.pi) if ccw else -((p0 - p1) % (2 * math.pi))
        if sweep == 0.0:
            sweep = 2 * math.pi if ccw else -2 * math.pi
        step = 2.0 * math.acos(1.0 - chord_tol)
        m = max(2, int(math.ceil(abs(sweep) / step)))
        for k in range(1, m):
            t = p0 + sweep * k / m
            verts.append((cx + R * math.cos(t), cy + R * math.sin(t)))
    return Ring(tuple(verts), ring.orientation)


def _finish(rings, polygonize=False, chord_tol=DEFAULT_CHORD_TOL) -> PolygonSet:
    if polygonize:
        rings = [_chords(r, chord_tol) for r in rings]
    return PolygonSet(tuple(rings))


def _sector_ring(alpha, beta, r0, r1) -> Ring:
    lo, hi = beta - 0.5 * alpha, beta + 0.5 * alpha
    return Ring(
        (_pt(r0, lo), _pt(r1, lo), _pt(r1, hi), _pt(r0, hi)),
        "outer",
        (None, (0.0, 0.0, True), None, (0.0, 0.0, False)),
    )


def half_disk(R=1.0, **kw) -> PolygonSet:
    """``{x_1 > 0, |x| < R}``."""
    return _finish([Ring(((0.0, -R), (0.0, R)), "outer", ((0.0, 0.0, True), None))], **kw)


def disk(R=1.0, **kw) -> PolygonSet:
    return _finish([Ring(((R, 0.0),), "outer", ((0.0, 0.0, True),))], **kw)


def wedge(alpha=math.pi / 3, r0=1.0, r1=2.0, **kw) -> PolygonSet:
    """Annular sector ``{r0 < r < r1, |theta| < alpha/2}``."""
    return _finish([_sector_ring(alpha, 0.0, r0, r1)], **kw)


def rotated_wedge(alpha=math.pi / 3, beta=math.pi / 4, r0=1.0, r1=2.0, **kw) -> PolygonSet:
    return _finish([_sector_ring(alpha, beta, r0, r1)], **kw)


def split_wedge(alpha=math.pi / 3, r0=1.0, r1=2.0, **kw) -> PolygonSet:
    """Two sectors of width ``alpha/2`` centred at ``±pi/2``: same slice measures as a wedge."""
    half = 0.5 * alpha
    return _finish([_sector_ring(half, 0.5 * math.pi, r0, r1), _sector_ring(half, -0.5 * math.pi, r0, r1)], **kw)


def drifted_wedge(alpha=math.pi / 3, c=1.0, r0=1.0, r1=2.0) -> ArcFamilySet:
    """Sector whose centre angle drifts linearly: ``theta_c = c (r - r0)``."""
    return ArcFamilySet(
        ((r0, r1),), BuiltinField("constant", value=alpha), BuiltinField("affine", c0=-c * r0, cr=c)
    )


def twisted_band(alpha=math.pi / 3, s=1.0, r0=1.0, r1=2.0, z0=0.0, z1=1.0) -> ArcFamilySet:
    """Three-dimensional band whose arc centre turns with height: ``theta_c = s z``."""
    return ArcFamilySet(
        ((r0, r1), (z0, z1)), BuiltinField("constant", value=alpha), BuiltinField("affine", cz=s)
    )


def sin_band(a=math.pi / 2, b=1.0, r0=1.0, r1=2.0) -> ArcFamilySet:
    """Centred arcs of width ``a + b sin r``."""
    return ArcFamilySet(((r0, r1),), BuiltinField("sin_profile", a=a, b=b))


def unit_square() -> PolygonSet:
    return PolygonSet((Ring(((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0))),))


def sheared_square() -> PolygonSet:
    """``{0 < x < 1, x < y < x + 1}``."""
    return PolygonSet((Ring(((0.0, 0.0), (1.0, 1.0), (1.0, 2.0), (0.0, 1.0))),))


def stacked_squares() -> PolygonSet:
    """Unit squares over ``[0, 1]`` at heights ``[0, 1]`` and ``[2, 3]``."""
    return PolygonSet(
        (
            Ring(((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0))),
            Ring(((0.0, 2.0), (1.0, 2.0), (1.0, 3.0), (0.0, 3.0))),
        )
    )


def random_polygon(n=12, seed=0, center_scale=1.0, r_min=0.3, r_max=1.5) -> PolygonSet:
    """Polygon star-shaped about a random centre, with one vertex per angular sector."""
    rng = np.random.default_rng(seed)
    n = int(n)
    cx, cy = rng.uniform(-center_scale, center_scale, 2)
    # one angle per sector keeps consecutive gaps below pi, hence a simple ring
    ang = (np.arange(n) + rng.uniform(0.1, 0.9, n)) * (2 * math.pi / n)
    rad = rng.uniform(r_min, r_max, n)
    verts = tuple((float(cx + r * math.cos(t)), float(cy + r * math.sin(t))) for r, t in zip(rad, ang))
    return PolygonSet((Ring(verts),))


GENERATORS = {
    "half_disk": half_disk,
    "disk": disk,
    "wedge": wedge,
    "rotated_wedge": rotated_wedge,
    "split_wedge": split_wedge,
    "drifted_wedge": drifted_wedge,
    "twisted_band": twisted_band,
    "sin_band": sin_band,
    "unit_square": unit_square,
    "sheared_square": sheared_square,
    "stacked_squares": stacked_squares,
    "random_polygon": random_polygon,
}


def generate(name: str, params: dict | None = None):
    """Build a fixture by name; unknown names or parameters raise ``ValueError``."""
    if name not in GENERATORS:
        raise ValueError(f"unknown generator {name!r}; known: {sorted(GENERATORS)}")
    try:
        return GENERATORS[name](**(params or {}))
    except TypeError as exc:
        raise ValueError(f"bad parameters for {name}: {exc}") from exc
