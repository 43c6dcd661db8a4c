"""Discrete BV calculus on uniform grids.

A grid function is split into an absolutely continuous gradient (per cell)
and jumps (per interface).  Along any grid line the split telescopes
exactly, with half weight on the two end cells::

    sum(ac * h) - h/2 (ac[0] + ac[-1]) + sum(jump masses) == f[-1] - f[0]

Jumps are interfaces whose difference dwarfs the local median difference.
Each jump's mass is corrected by the one-sided slopes of its neighbours so
that smooth growth on either side is not counted twice.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import median_filter

from .grid import FACE_EPS, Box, GridFunction, GridSpec
from .sets import TWO_PI

POSITIVE_EPS = 1e-12  # mu (or v) above this counts as positive
FULL_RTOL = 1e-9  # mu >= 2 pi r (1 - FULL_RTOL) is a full slice
DEFAULT_THRESHOLD = 10.0


class FullSliceWarning(UserWarning):
    """The distribution reaches 2 pi r on cells of positive measure."""


@dataclass(frozen=True)
class AxisSplit:
    """Decomposition of a grid function along one axis."""

    ac: np.ndarray  # per-cell derivative along the axis
    jump: np.ndarray  # per-interface boolean
    mass: np.ndarray  # corrected jump mass (0 where no jump)
    slope_left: np.ndarray  # slope of the smooth neighbour on the left of each jump
    slope_right: np.ndarray


def split_axis(values: np.ndarray, h: float, axis: int, threshold=DEFAULT_THRESHOLD, floor=None) -> AxisSplit:
    """Split ``values`` along ``axis`` into ac derivative and jumps."""
    f = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(f)):
        raise ValueError("non-finite values in grid function")
    f = np.moveaxis(f, axis, 0)
    n = f.shape[0]
    if n < 2:
        z = np.zeros((0,) + f.shape[1:])
        return AxisSplit(np.moveaxis(np.zeros_like(f), 0, axis), *(np.moveaxis(z, 0, axis) for _ in range(4)))
    delta = np.diff(f, axis=0)
    if floor is None:
        floor = 1e-9 * max(1.0, float(np.abs(f).max()))
    size = (5,) + (1,) * (f.ndim - 1)
    scale = median_filter(np.abs(delta), size=size, mode="nearest")
    jump = (np.abs(delta) > threshold * scale) & (np.abs(delta) > floor)
    D = np.where(jump, 0.0, delta / h)
    pad = np.zeros((1,) + f.shape[1:])
    gl = np.concatenate([pad, D[:-1]], axis=0)  # smooth slope on the left of interface k
    gr = np.concatenate([D[1:], pad], axis=0)
    gl = np.where(jump, gl, 0.0)
    gr = np.where(jump, gr, 0.0)
    # contribution of interface k to cells k (left) and k+1 (right)
    to_left = np.where(jump, 0.5 * gl, 0.5 * D)
    to_right = np.where(jump, 0.5 * gr, 0.5 * D)
    ac = np.zeros_like(f)
    ac[:-1] += to_left
    ac[1:] += to_right
    # end cells see one interface only: extrapolate its slope across the cell
    ac[0] *= 2.0
    ac[-1] *= 2.0
    mass = np.where(jump, delta - 0.5 * h * (gl + gr), 0.0)
    mv = lambda a: np.moveaxis(a, 0, axis)  # noqa: E731
    return AxisSplit(mv(ac), mv(jump), mv(mass), mv(gl), mv(gr))


@dataclass(frozen=True, eq=False)
class JumpSet:
    """Jumps on grid interfaces.

    ``index[j]`` is the cell on the low side of jump ``j`` along ``axis[j]``;
    ``loc[j]`` the interface coordinate; ``mass[j]`` the corrected jump of
    the decomposed function.
    """

    grid: GridSpec
    axis: np.ndarray
    index: np.ndarray
    loc: np.ndarray
    mass: np.ndarray

    @property
    def n(self) -> int:
        return len(self.mass)

    @property
    def magnitudes(self) -> np.ndarray:
        return np.abs(self.mass)

    def other_coord(self) -> np.ndarray:
        """Cell-centre coordinate along the other axis (2-D grids), else NaN."""
        if self.grid.dim == 1:
            return np.full(self.n, np.nan)
        out = np.empty(self.n)
        for j in range(self.n):
            o = 1 - int(self.axis[j])
            out[j] = self.grid.centers(o)[self.index[j, o]]
        return out

    def in_box(self, box: Box) -> np.ndarray:
        """Jumps whose interface lies in ``box``; faces count per the box closure."""
        keep = np.zeros(self.n, dtype=bool)
        oc = self.other_coord()
        for j in range(self.n):
            ax = int(self.axis[j])
            tol = FACE_EPS * self.grid.spacing[ax]
            ok = bool(box.contains_coord(ax, self.loc[j], tol))
            if ok and self.grid.dim == 2:
                ok = bool(box.contains_coord(1 - ax, oc[j]))
            keep[j] = ok
        return keep

    @classmethod
    def from_splits(cls, grid: GridSpec, splits: list[AxisSplit]) -> "JumpSet":
        axes, idx, locs, masses = [], [], [], []
        for ax, sp in enumerate(splits):
            if sp is None:
                continue
            ij = np.argwhere(sp.jump)
            h = grid.spacing[ax]
            for t in ij:
                axes.append(ax)
                idx.append(t)
                locs.append(grid.domain[ax][0] + (t[ax] + 1) * h)
                masses.append(sp.mass[tuple(t)])
        d = grid.dim
        return cls(
            grid,
            np.array(axes, dtype=int),
            np.array(idx, dtype=int).reshape(-1, d),
            np.array(locs, dtype=float),
            np.array(masses, dtype=float),
        )


def bv_decompose(f: GridFunction, threshold: float = DEFAULT_THRESHOLD, floor=None):
    """Return ``(ac, jumps)``: the per-cell gradient (last axis = grid axis) and the JumpSet.

    An interface is a jump when its difference exceeds ``threshold`` times
    the median absolute difference over the five nearest interfaces, and
    an absolute floor.
    """
    g = f.grid
    splits = [split_axis(f.values, g.spacing[ax], ax, threshold, floor) for ax in range(g.dim)]
    ac = np.stack([sp.ac for sp in splits], axis=-1)
    return ac, JumpSet.from_splits(g, splits)


@dataclass(frozen=True, eq=False)
class SigmaMeasure:
    """Discrete vector measure: per-cell density plus weighted interface atoms.

    Circular slots are ``(r d_r xi, 2 chi, d_z mu)``; Steiner slots are
    ``(grad v, 2 chi)``.  ``lebesgue_slot`` is the index of the ``2 chi``
    component.
    """

    grid: GridSpec
    mode: str
    ac: np.ndarray
    support: np.ndarray
    jumps: JumpSet
    weights: np.ndarray  # (n_jumps, k)
    full_cells: np.ndarray = field(default=None)
    literal: bool = False

    @property
    def k(self) -> int:
        return self.ac.shape[-1]

    @property
    def lebesgue_slot(self) -> int:
        return 1 if self.mode == "circular" else self.k - 1


def _support(mu: GridFunction, literal: bool):
    vals = mu.values
    pos = vals > POSITIVE_EPS
    if mu.mode != "circular":
        return pos, np.zeros_like(pos)
    full = vals >= TWO_PI * mu.radii() * (1.0 - FULL_RTOL)
    if full.any():
        n = int(full.sum())
        if literal:
            msg = f"{n} full-slice cells kept in the support indicator (literal sigma)"
        else:
            msg = f"{n} full-slice cells excluded from the support indicator"
        warnings.warn(msg, FullSliceWarning, stacklevel=3)
    if not literal:
        pos = pos & ~full
    return pos, full


def sigma_measure(mu: GridFunction, mode: str | None = None, threshold=DEFAULT_THRESHOLD, literal=False) -> SigmaMeasure:
    """Assemble sigma_mu (circular) or sigma_v (steiner) from a distribution.

    Full slices (mu = 2 pi r) carry no boundary of the symmetral, so by
    default they are left out of the support indicator and a
    :class:`FullSliceWarning` is issued; ``literal=True`` keeps them.
    """
    mode = mode or mu.mode
    if mode != mu.mode:
        raise ValueError("mode disagrees with the distribution")
    g = mu.grid
    d = g.dim
    k = d + 1
    support, full = _support(mu, literal)
    chi2 = np.where(support, 2.0, 0.0)
    if mode == "circular":
        r = mu.radii()
        xi = mu.values / r
        sr = split_axis(xi, g.spacing[0], 0, threshold)
        comps = [r * sr.ac, chi2]
        splits = [sr]
        if d == 2:
            sz = split_axis(mu.values, g.spacing[1], 1, threshold)
            comps.append(sz.ac)
            splits.append(sz)
        ac = np.stack(comps, axis=-1)
        jumps = JumpSet.from_splits(g, splits)
        w = np.zeros((jumps.n, k))
        for j in range(jumps.n):
            ax = int(jumps.axis[j])
            if ax == 0:
                other = g.spacing[1] if d == 2 else 1.0
                w[j, 0] = jumps.loc[j] * jumps.mass[j] * other
            else:
                w[j, 2] = jumps.mass[j] * g.spacing[0]
    else:
        splits = [split_axis(mu.values, g.spacing[ax], ax, threshold) for ax in range(d)]
        ac = np.stack([sp.ac for sp in splits] + [chi2], axis=-1)
        jumps = JumpSet.from_splits(g, splits)
        w = np.zeros((jumps.n, k))
        for j in range(jumps.n):
            ax = int(jumps.axis[j])
            other = g.spacing[1 - ax] if d == 2 else 1.0
            w[j, ax] = jumps.mass[j] * other
    return SigmaMeasure(g, mode, ac, support, jumps, w, full, literal)


def _sequential_norm(v: np.ndarray) -> np.ndarray:
    """Euclidean norm over the last axis, summing squares in slot order."""
    s = v[..., 0] * v[..., 0]
    for c in range(1, v.shape[-1]):
        s = s + v[..., c] * v[..., c]
    return np.sqrt(s)


def jump_norms(weights: np.ndarray) -> np.ndarray:
    return _sequential_norm(weights) if len(weights) else np.zeros(0)


def total_variation(sigma: SigmaMeasure, box: Box) -> float:
    """``|sigma|(box)``: cell densities times cell area plus atoms on interfaces in ``box``."""
    mask = sigma.grid.cell_mask(box)
    dens = _sequential_norm(sigma.ac)
    ac_part = float(np.sum(dens[mask] * sigma.grid.cell_volume))
    keep = sigma.jumps.in_box(box)
    j_part = float(np.sum(jump_norms(sigma.weights)[keep]))
    return ac_part + j_part


def cell_contributions(sigma: SigmaMeasure, box: Box) -> GridFunction:
    """Per-cell share of ``|sigma|(box)``: cell density times area plus the atoms on
    the interfaces above each cell.  Summing the values gives :func:`total_variation`."""
    mask = sigma.grid.cell_mask(box)
    vals = np.where(mask, _sequential_norm(sigma.ac) * sigma.grid.cell_volume, 0.0)
    keep = sigma.jumps.in_box(box)
    if keep.any():
        np.add.at(vals, tuple(sigma.jumps.index[keep].T), jump_norms(sigma.weights)[keep])
    return GridFunction(sigma.grid, vals, sigma.mode, "perimeter")


def polar(sigma: SigmaMeasure):
    """Unit direction ``d sigma / d|sigma|`` on cells and jumps (zero where |sigma| vanishes)."""
    dens = _sequential_norm(sigma.ac)[..., None]
    ac = np.divide(sigma.ac, dens, out=np.zeros_like(sigma.ac), where=dens > 0)
    jn = jump_norms(sigma.weights)[:, None]
    jw = np.divide(sigma.weights, jn, out=np.zeros_like(sigma.weights), where=jn > 0)
    return ac, jw


def pairing(sigma: SigmaMeasure, phi, box: Box) -> float:
    """``∫_box phi · d sigma``.

    ``phi`` is a constant vector, or a pair ``(cell_field, jump_field)`` of
    arrays shaped like ``sigma.ac`` and ``sigma.weights``.
    """
    if isinstance(phi, tuple) and len(phi) == 2 and np.ndim(phi[0]) > 1:
        pc, pj = np.asarray(phi[0], float), np.asarray(phi[1], float)
    else:
        vec = np.asarray(phi, dtype=float).reshape(-1)
        if vec.shape[0] != sigma.k:
            raise ValueError(f"phi needs {sigma.k} components")
        pc = np.broadcast_to(vec, sigma.ac.shape)
        pj = np.broadcast_to(vec, sigma.weights.shape)
    mask = sigma.grid.cell_mask(box)
    cell = np.sum(pc * sigma.ac, axis=-1)
    total = float(np.sum(cell[mask])) * sigma.grid.cell_volume
    keep = sigma.jumps.in_box(box)
    if keep.any():
        total += float(np.sum(np.sum(pj * sigma.weights, axis=-1)[keep]))
    return total
