"""Circular and Steiner symmetrals, their monotonicity, and local densities."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ._parallel import pmap
from .arcfamily import ArcFamilySet, BuiltinField, InterpolatedField
from .bv import DEFAULT_THRESHOLD, POSITIVE_EPS, split_axis
from .grid import GridFunction, SliceGrid
from .sets import TWO_PI, AngularArcSet, IntervalSet
from .slicing import _check_bounds

CENTER_TOL = 1e-12
AXIS_OFFSET = 1e-12


def xi_interpolant(mu: GridFunction, threshold=DEFAULT_THRESHOLD) -> InterpolatedField:
    """Piecewise-linear xi = mu/r with walls at the detected jumps."""
    g = mu.grid
    xi = mu.values / mu.radii()
    jumps, gl, gr = [], [], []
    for ax in range(g.dim):
        sp = split_axis(xi, g.spacing[ax], ax, threshold)
        jumps.append(sp.jump)
        gl.append(sp.slope_left)
        gr.append(sp.slope_right)
    return InterpolatedField(g, xi, jumps, gl, gr)


def build_F_mu(mu: GridFunction, threshold=DEFAULT_THRESHOLD) -> ArcFamilySet:
    """The circular symmetral: slices ``|theta| < xi/2`` with xi interpolated from ``mu``."""
    if mu.mode != "circular":
        raise ValueError("F_mu needs a circular distribution")
    _check_bounds(np.asarray(mu.values), mu.grid, "circular")
    field = xi_interpolant(mu, threshold)
    dom = list(mu.grid.domain)
    lo, hi = dom[0]
    if lo <= 0:  # the axis itself is H^1-null; start just off it
        dom[0] = (AXIS_OFFSET * hi, hi)
    return ArcFamilySet(tuple(dom), field, BuiltinField("constant", value=0.0))


def build_F_v(v: GridFunction) -> SliceGrid:
    """The Steiner symmetral: per-cell slices ``(-v/2, v/2)``."""
    if v.mode != "steiner":
        raise ValueError("F[v] needs a steiner distribution")
    _check_bounds(np.asarray(v.values), v.grid, "steiner")
    cells = np.empty(v.grid.shape, dtype=object)
    for idx, val in np.ndenumerate(v.values):
        cells[idx] = IntervalSet(((-0.5 * val, 0.5 * val),)) if val > POSITIVE_EPS else IntervalSet(())
    return SliceGrid(v.grid, cells, "steiner")


@dataclass(frozen=True)
class MonotoneResult:
    ok: bool
    violation: Optional[tuple] = None  # (coordinates, reason)

    def __bool__(self):
        return self.ok


def _centred_arc(s: AngularArcSet) -> Optional[str]:
    if s.full or s.empty:
        return None
    if s.n_components != 1:
        return f"{s.n_components} arcs"
    lo, hi = s.arcs[0]
    if abs(lo + hi) > CENTER_TOL * max(1.0, abs(hi)):
        return f"arc centred at {0.5 * (lo + hi):.6g}"
    return None


def _centred_interval(s: IntervalSet) -> Optional[str]:
    if s.empty:
        return None
    if s.n_components != 1:
        return f"{s.n_components} intervals"
    lo, hi = s.intervals[0]
    if abs(lo + hi) > CENTER_TOL * max(1.0, abs(hi)):
        return f"interval centred at {0.5 * (lo + hi):.6g}"
    return None


def monotone_check(F, n_samples: int = 64) -> MonotoneResult:
    """Whether every slice is one arc centred on the positive first axis (or one centred interval).

    Arc families are sampled on an ``n_samples``-per-axis grid of their
    domain; slice grids are checked cell by cell in index order.
    """
    if isinstance(F, SliceGrid):
        test = _centred_arc if F.mode == "circular" else _centred_interval
        for idx, s in np.ndenumerate(F.cells):
            why = test(s)
            if why:
                coords = tuple(float(F.grid.centers(a)[i]) for a, i in enumerate(idx))
                return MonotoneResult(False, (coords, why))
        return MonotoneResult(True)
    if isinstance(F, ArcFamilySet):
        axes = [lo + (np.arange(n_samples) + 0.5) * (hi - lo) / n_samples for lo, hi in F.domain]
        pts = np.meshgrid(*axes, indexing="ij")
        r = pts[0]
        z = pts[1] if F.k == 3 else None
        w = F.xi_at(r, z)
        c = np.mod(F.center_at(r, z) + math.pi, TWO_PI) - math.pi
        bad = (w > 0) & (w < TWO_PI) & (np.abs(c) > CENTER_TOL)
        if bad.any():
            idx = tuple(np.argwhere(bad)[0])
            coords = tuple(float(p[idx]) for p in pts)
            return MonotoneResult(False, (coords, f"arc centred at {float(c[idx]):.6g}"))
        return MonotoneResult(True)
    raise TypeError(f"cannot check {type(F).__name__}")


class DensityError(ValueError):
    """The requested density evaluation point or radius is inadmissible."""


@dataclass(frozen=True, eq=False)
class DensityProfile:
    gammas: np.ndarray
    rhos: np.ndarray
    estimates: np.ndarray  # (n_gamma, n_rho)
    stderr: np.ndarray
    n_samples: int
    seed: int

    @property
    def final(self) -> np.ndarray:
        """Estimate at the smallest radius for each angle."""
        return self.estimates[:, -1]

    @property
    def final_stderr(self) -> np.ndarray:
        return self.stderr[:, -1]

    def to_csv(self) -> str:
        lines = ["gamma,rho,estimate,stderr"]
        for i, g in enumerate(self.gammas):
            for j, rho in enumerate(self.rhos):
                lines.append(f"{float(g)!r},{float(rho)!r},{float(self.estimates[i, j])!r},{float(self.stderr[i, j])!r}")
        return "\n".join(lines) + "\n"


def default_rho_schedule(rho0: float = 0.1, n: int = 5) -> np.ndarray:
    return rho0 * 2.0 ** -np.arange(n)


def _ball_samples(rng: np.random.Generator, k: int, n: int) -> np.ndarray:
    """Stratified jittered points in the unit ball of R^k."""
    m = math.isqrt(n)
    i, j = np.divmod(np.arange(m * m), m)
    s1 = (i + rng.random(m * m)) / m
    s2 = (j + rng.random(m * m)) / m
    extra = n - m * m
    s1 = np.concatenate([s1, rng.random(extra)])
    s2 = np.concatenate([s2, rng.random(extra)])
    if k == 2:
        rad = np.sqrt(s1)
        ang = TWO_PI * s2
        return np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=1)
    rad = np.cbrt(rng.random(n))
    cphi = 1.0 - 2.0 * s1
    sphi = np.sqrt(np.maximum(0.0, 1.0 - cphi * cphi))
    az = TWO_PI * s2
    return np.stack([rad * sphi * np.cos(az), rad * sphi * np.sin(az), rad * cphi], axis=1)


def density_profile(
    F: ArcFamilySet,
    r: float,
    z: Optional[float] = None,
    gammas: Sequence[float] = (0.0,),
    rho_schedule: Optional[Sequence[float]] = None,
    n_samples: int = 100_000,
    seed: int = 0,
) -> DensityProfile:
    """Monte Carlo estimate of ``|F ∩ B_rho(x)| / |B_rho|`` at ``x = (R_gamma (r, 0), z)``.

    Every (gamma, rho) pair draws from its own seeded substream, so the
    result does not depend on how the work is scheduled.
    """
    rhos = default_rho_schedule() if rho_schedule is None else np.asarray(rho_schedule, dtype=float)
    gammas = np.asarray(gammas, dtype=float)
    if np.any(np.diff(rhos) >= 0) or np.any(rhos <= 0):
        raise DensityError("radius schedule must be positive and decreasing")
    (rlo, rhi) = F.domain[0]
    if not rlo < r < rhi:
        raise DensityError(f"r = {r} is not inside the domain ({rlo}, {rhi})")
    dist = min(r - rlo, rhi - r)
    if F.k == 3:
        if z is None:
            raise DensityError("a height z is needed for a three-dimensional set")
        zlo, zhi = F.domain[1]
        if not zlo < z < zhi:
            raise DensityError(f"z = {z} is not inside the domain ({zlo}, {zhi})")
        dist = min(dist, z - zlo, zhi - z)
    if rhos[0] >= dist:
        raise DensityError(f"rho = {rhos[0]} reaches the domain boundary (distance {dist})")

    def task(ij):
        i, j = ij
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(i, j)))
        g = gammas[i]
        centre = [r * math.cos(g), r * math.sin(g)] + ([z] if F.k == 3 else [])
        pts = np.asarray(centre) + rhos[j] * _ball_samples(rng, F.k, n_samples)
        p = float(np.mean(F.contains(pts)))
        return p, math.sqrt(max(p * (1.0 - p), 0.0) / n_samples)

    jobs = [(i, j) for i in range(len(gammas)) for j in range(len(rhos))]
    res = pmap(task, jobs)
    est = np.array([p for p, _ in res]).reshape(len(gammas), len(rhos))
    se = np.array([s for _, s in res]).reshape(len(gammas), len(rhos))
    return DensityProfile(gammas, rhos, est, se, n_samples, seed)


def is_nonincreasing(profile: DensityProfile, n_se: float = 3.0) -> bool:
    """Whether estimates never rise by more than ``n_se`` combined standard errors along gamma."""
    order = np.argsort(profile.gammas, kind="stable")
    e, s = profile.estimates[order], profile.stderr[order]
    rise = e[1:] - e[:-1]
    allow = n_se * np.hypot(s[1:], s[:-1])
    return bool(np.all(rise <= allow + 1e-15))
