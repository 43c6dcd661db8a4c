"""Static SVG pictures: set boundary, sample slice circles and inner normals."""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .arcfamily import ArcFamilySet
from .diagnostics import boundary_normals
from .grid import SliceGrid
from .polygon import PolygonSet
from .sets import TWO_PI

_SIZE = 480
_ARROW = 0.12


def _polygon_paths(P: PolygonSet, n=64):
    et = P.edges
    paths, cur = [], []
    for i in range(et.m):
        ts = np.linspace(0.0, 1.0, n if et.is_arc[i] else 2)
        cur.extend(et.point(i, float(t)) for t in ts)
        if i + 1 == et.m or et.ring[i + 1] != et.ring[i]:
            paths.append(np.array(cur))
            cur = []
    return paths


def _arcfamily_path(A: ArcFamilySet, z: Optional[float], n=256):
    lo, hi = A.domain[0]
    r = np.linspace(lo, hi, n)
    zz = None if A.k == 2 else np.full_like(r, z)
    w = A.xi_at(r, zz)
    c = A.center_at(r, zz)
    up, down = c + 0.5 * w, c - 0.5 * w
    rr = np.concatenate([r, r[::-1]])
    th = np.concatenate([up, down[::-1]])
    return [np.stack([rr * np.cos(th), rr * np.sin(th)], axis=1)]


def _slicegrid_paths(S: SliceGrid, z_index: int = 0):
    paths = []
    cells = S.cells if S.grid.dim == 1 else S.cells[:, z_index]
    for s in cells:
        for lo, hi in s._intervals():
            th = np.linspace(lo, hi, max(2, int(32 * (hi - lo) / TWO_PI) + 2))
            paths.append(np.stack([s.radius * np.cos(th), s.radius * np.sin(th)], axis=1))
    return paths


def _colour(circ) -> str:
    """Red for the radial part, green for the tangential part, blue for the vertical part."""
    v = abs(circ.vertical[0]) if circ.vertical else 0.0
    rgb = [int(round(255 * min(1.0, x))) for x in (abs(circ.radial), circ.tangential, v)]
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def render_svg(
    source,
    radii: Sequence[float] = (),
    z: Optional[float] = None,
    normals: bool = True,
    title: str = "",
) -> str:
    """SVG of the section of ``source`` at height ``z`` with circles at ``radii``.

    Inner normals are drawn at the slice endpoints on each circle and
    coloured by their circularised components.
    """
    if isinstance(source, PolygonSet):
        paths = _polygon_paths(source)
    elif isinstance(source, ArcFamilySet):
        if source.k == 3 and z is None:
            z = 0.5 * sum(source.domain[1])
        paths = _arcfamily_path(source, z)
    elif isinstance(source, SliceGrid):
        paths = _slicegrid_paths(source)
        normals = False
    else:
        raise TypeError(f"cannot render {type(source).__name__}")
    pts = np.concatenate(paths + [np.zeros((1, 2))])
    ext = max(float(np.abs(pts).max()), *(float(r) for r in radii), 1e-9) * 1.15
    scale = _SIZE / (2 * ext)

    def xy(p):
        return f"{(p[0] + ext) * scale:.3f},{(ext - p[1]) * scale:.3f}"

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SIZE}" height="{_SIZE}" viewBox="0 0 {_SIZE} {_SIZE}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    if title:
        out.append(f'<title>{title}</title>')
    c = _SIZE / 2
    out.append(f'<line x1="0" y1="{c}" x2="{_SIZE}" y2="{c}" stroke="#ccc"/>')
    out.append(f'<line x1="{c}" y1="0" x2="{c}" y2="{_SIZE}" stroke="#ccc"/>')
    fill = "none" if isinstance(source, SliceGrid) else "#dde8f5"
    close = " Z" if fill != "none" else ""
    d = " ".join("M " + " L ".join(xy(q) for q in p) + close for p in paths)
    out.append(f'<path d="{d}" fill="{fill}" fill-rule="evenodd" stroke="#1f3b73" stroke-width="1.5"/>')
    for r in radii:
        out.append(
            f'<circle cx="{c}" cy="{c}" r="{r * scale:.3f}" fill="none" stroke="#888" stroke-dasharray="4 3"/>'
        )
        if not normals or r <= 0:
            continue
        bn = boundary_normals(source, float(r), z)
        for p, nu, circ in zip(bn.points, bn.normals, bn.circ):
            tip = p[:2] + _ARROW * ext * nu[:2]
            (x1, y1), (x2, y2) = (xy(q).split(",") for q in (p, tip))
            out.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="{_colour(circ)}" stroke-width="2"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
