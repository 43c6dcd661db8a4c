"""``symmlab`` command line.

Exit codes: 0 success, 1 usage, 2 invariant breach or refused computation,
3 malformed JSON, 4 schema violation, 5 region outside the domain.  Every
non-zero exit writes one JSON object to standard error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import io
from .arcfamily import ArcFamilySet
from .bv import DEFAULT_THRESHOLD, cell_contributions, sigma_measure, total_variation
from .diagnostics import InvariantBreach, default_grid, exact_symmetral, source_features, verify_inequality
from .grid import Box, GridSpec, RegionError, SliceGrid
from .perimeter import (DEFAULT_NQ, QuadratureError, arcfamily_perimeter, perimeter_F_mu_formula, polygon_perimeter,
                        polygon_symmetral_perimeter)
from .polygon import PolygonSet
from .render import render_svg
from .slicing import DistributionError, distribution
from .steiner import steiner_grid, steiner_sigma, steiner_verify
from .symmetral import DensityError, build_F_mu, build_F_v, default_rho_schedule, density_profile

EXIT_OK, EXIT_USAGE, EXIT_BREACH = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p: argparse.ArgumentParser):
    p.add_argument("--set", dest="set_path", required=True, metavar="FILE.json")
    p.add_argument("--mode", choices=("circular", "steiner"), default="circular")
    p.add_argument("--region", help="e.g. 'r:[1,2]' or 'r:(1,2),z:[0,1]'; brackets set closure")
    p.add_argument("--closure", choices=("closed", "open", "halfopen"), help="override the bracket closure")
    p.add_argument("--grid", help="cells per axis inside the region: NR[,NZ]")
    p.add_argument("--quad", type=int, default=DEFAULT_NQ, metavar="NQ")
    p.add_argument("--tol", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--literal-sigma", action="store_true", help="keep full slices in the support indicator")
    p.add_argument("--out", metavar="PATH", help="write the main output here instead of standard output")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="symmlab", description="Circular and Steiner symmetrisation diagnostics.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    mu = sub.add_parser("mu", help="distribution function as CSV")
    mu.add_argument("--digits", type=int, default=12, help="significant digits of the values; 0 writes them exactly")
    sym = sub.add_parser("symmetrize", help="symmetral as JSON, plus an SVG picture")
    sym.add_argument("--svg", metavar="PATH", help="SVG path (default: next to --out)")
    per = sub.add_parser("perimeter", help="all perimeter routes and their agreement")
    per.add_argument("--cells-csv", metavar="PATH", help="also write the per-cell share of |sigma| as CSV")
    sub.add_parser("verify", help="inequality and equality-case report")
    den = sub.add_parser("density", help="local density profile of the symmetral along R_gamma")
    den.add_argument("--r", type=float, required=True)
    den.add_argument("--z", type=float)
    den.add_argument("--gammas", default="0", help="comma-separated angles")
    den.add_argument("--rho", default=None, help="comma-separated decreasing radii")
    den.add_argument("--samples", type=int, default=100_000)
    ren = sub.add_parser("render", help="SVG of the set, slice circles and normals")
    ren.add_argument("--radii", default="", help="comma-separated slice radii")
    ren.add_argument("--z", type=float)
    for p in sub.choices.values():
        _common(p)
    return ap


# -- argument helpers ---------------------------------------------------


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _grid_counts(text, dim):
    if text is None:
        return None
    try:
        n = [int(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"--grid expects NR[,NZ], got {text!r}") from None
    if any(m < 4 for m in n) or len(n) not in (1, dim):
        raise UsageError(f"--grid needs {dim} count(s) of at least 4")
    return tuple(n * dim if len(n) == 1 else n)


def _set_dim(S) -> int:
    if isinstance(S, ArcFamilySet):
        return S.k - 1
    if isinstance(S, SliceGrid):
        return S.grid.dim
    return 1


def _default_region(S, mode) -> Box:
    if isinstance(S, ArcFamilySet):
        return Box(S.domain, ((True, True),) * len(S.domain))
    if isinstance(S, SliceGrid):
        return Box(S.grid.domain)
    if mode == "steiner":
        lo, hi = S.x_range()
        pad = 0.05 * (hi - lo)
        return Box(((lo - pad, hi + pad),))
    return Box(((0.0, 1.05 * S.max_radius()),))


def _region(args, S) -> Box:
    axes = ("x",) if args.mode == "steiner" else ("r", "z")
    if args.region is None:
        box = _default_region(S, args.mode)
    else:
        try:
            box = Box.parse(args.region, axes)
        except RegionError as exc:
            raise UsageError(str(exc)) from None
    if args.closure:
        box = box.with_closure(args.closure)
    if args.mode == "circular" and box.bounds[0][0] < 0:
        raise io.RegionOutsideDomain("radial bounds must be non-negative")
    io.check_region_in_domain(box, S)
    return box


def _grid_for(args, S, box: Box) -> GridSpec:
    if isinstance(S, SliceGrid):
        return S.grid
    n = _grid_counts(args.grid, box.dim) or (1000 if box.dim == 1 else 200)
    return GridSpec(box.bounds, n if isinstance(n, tuple) else (n,) * box.dim)


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _jsontext(obj) -> str:
    return io.dumps(obj) + "\n"


# -- subcommands --------------------------------------------------------


def cmd_mu(args, S):
    box = _region(args, S)
    grid = _grid_for(args, S, box)
    _emit(distribution(S, grid, args.mode).to_csv(args.digits), args.out)
    return EXIT_OK


def cmd_symmetrize(args, S):
    box = _region(args, S)
    grid = _grid_for(args, S, box)
    mu = distribution(S, grid, args.mode)
    if args.mode == "circular":
        F = exact_symmetral(S) if isinstance(S, ArcFamilySet) else build_F_mu(mu)
    else:
        F = build_F_v(mu)
    _emit(_jsontext(io.set_to_json(F)), args.out)
    svg = args.svg or (str(Path(args.out).with_suffix(".svg")) if args.out else None)
    if svg and args.mode == "circular":
        lo, hi = box.bounds[0]
        radii = [lo + (hi - lo) * t for t in (0.25, 0.5, 0.75) if lo + (hi - lo) * t > 0]
        Path(svg).write_text(render_svg(F, radii, title="symmetral"))
    return EXIT_OK


def _agreement(name_a, a, name_b, b, tol):
    d = abs(a - b)
    return {"a": name_a, "b": name_b, "difference": d, "tolerance": tol, "agree": d <= tol}


def cmd_perimeter(args, S):
    box = _region(args, S)
    if args.mode == "steiner":
        if not isinstance(S, PolygonSet):
            raise io.SchemaViolation("steiner perimeters need a polygon set")
        n = _grid_counts(args.grid, 1)[0] if args.grid else 1000
        rep = steiner_verify(S, box, n)
        if args.cells_csv:
            v = distribution(S, steiner_grid(S, box, n), "steiner")
            Path(args.cells_csv).write_text(cell_contributions(steiner_sigma(v), box).to_csv())
        routes = {"boundary_length": rep.p_set, **rep.routes}
        table = [_agreement("total_variation", rep.routes["total_variation"], "total_variation_refined",
                            rep.routes["total_variation_refined"], rep.tolerance["inequality"])]
        _emit(_jsontext({"mode": "steiner", "region": rep.region, "routes": routes, "agreement": table}), args.out)
        return EXIT_OK
    grid = _grid_for(args, S, box) if isinstance(S, SliceGrid) else None
    if grid is None:
        grid = default_grid(box, _grid_counts(args.grid, box.dim), features=source_features(S))
    h = max(grid.spacing)
    mu = distribution(S, grid, "circular")
    sigma = sigma_measure(mu, literal=args.literal_sigma)
    tv = total_variation(sigma, box)
    if args.cells_csv:
        Path(args.cells_csv).write_text(cell_contributions(sigma, box).to_csv())
    formula = perimeter_F_mu_formula(mu, box, DEFAULT_THRESHOLD, args.literal_sigma)
    routes = {"total_variation": tv, "formula": formula}
    table = [_agreement("total_variation", tv, "formula", formula, 0.0)]
    if isinstance(S, PolygonSet):
        routes["boundary_length"] = polygon_perimeter(S, box, "circular")
        sym = polygon_symmetral_perimeter(S, box, args.literal_sigma)
        routes["quadrature_symmetral"] = sym.refined
        table.append(_agreement("total_variation", tv, "quadrature_symmetral", sym.refined, 10 * h + 10 * sym.difference))
    elif isinstance(S, ArcFamilySet):
        q = arcfamily_perimeter(S, box, args.quad)
        routes["quadrature"] = q.refined
        sym = arcfamily_perimeter(exact_symmetral(S), box, args.quad)
        routes["quadrature_symmetral"] = sym.refined
        table.append(_agreement("total_variation", tv, "quadrature_symmetral", sym.refined, 10 * h + 10 * sym.difference))
    if mu.grid.dim == 1:
        qF = arcfamily_perimeter(build_F_mu(mu), box, args.quad, check=False)
        routes["quadrature_F_mu"] = qF.refined
        table.append(_agreement("total_variation", tv, "quadrature_F_mu", qF.refined, 10 * h + 10 * qF.difference))
    out = {"mode": "circular", "region": box.format(), "grid": grid.to_json(), "routes": routes, "agreement": table}
    _emit(_jsontext(out), args.out)
    return EXIT_OK


def cmd_verify(args, S):
    box = _region(args, S)
    if args.mode == "steiner":
        if not isinstance(S, PolygonSet):
            raise io.SchemaViolation("steiner verification needs a polygon set")
        n = _grid_counts(args.grid, 1)
        rep = steiner_verify(S, box, n[0] if n else 1000, args.tol)
    else:
        if isinstance(S, SliceGrid):
            raise io.SchemaViolation("verification needs a set with a boundary (polygon or arc family)")
        rep = verify_inequality(S, box, _grid_counts(args.grid, box.dim), args.tol, args.quad, args.literal_sigma)
    _emit(_jsontext(rep.to_json()), args.out)
    if not rep.sound:
        raise InvariantBreach("; ".join(rep.breaches()))
    return EXIT_OK


def cmd_density(args, S):
    if args.mode != "circular":
        raise UsageError("density profiles are computed for circular symmetrals")
    if isinstance(S, ArcFamilySet):
        F = exact_symmetral(S)
    else:
        box = _region(args, S)
        F = build_F_mu(distribution(S, _grid_for(args, S, box), "circular"))
    rhos = default_rho_schedule() if args.rho is None else _floats(args.rho)
    prof = density_profile(F, args.r, args.z, _floats(args.gammas), rhos, args.samples, args.seed)
    _emit(prof.to_csv(), args.out)
    return EXIT_OK


def cmd_render(args, S):
    _emit(render_svg(S, _floats(args.radii), args.z), args.out)
    return EXIT_OK


COMMANDS = {
    "mu": cmd_mu,
    "symmetrize": cmd_symmetrize,
    "perimeter": cmd_perimeter,
    "verify": cmd_verify,
    "density": cmd_density,
    "render": cmd_render,
}


def _fail(code: int, kind: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message, "exit_code": code}) + "\n")
    return code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return _fail(EXIT_USAGE, "usage", str(exc))
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        S = io.load_set(args.set_path)
        return COMMANDS[args.command](args, S)
    except UsageError as exc:
        return _fail(EXIT_USAGE, "usage", str(exc))
    except io.InputError as exc:
        return _fail(exc.code, exc.kind, str(exc))
    except RegionError as exc:
        return _fail(io.RegionOutsideDomain.code, io.RegionOutsideDomain.kind, str(exc))
    except DensityError as exc:
        return _fail(io.RegionOutsideDomain.code, io.RegionOutsideDomain.kind, str(exc))
    except InvariantBreach as exc:
        return _fail(EXIT_BREACH, "invariant_breach", str(exc))
    except (QuadratureError, DistributionError) as exc:
        return _fail(EXIT_BREACH, "refused", str(exc))


if __name__ == "__main__":
    sys.exit(main())
