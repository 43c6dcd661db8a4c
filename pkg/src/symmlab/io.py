"""Set descriptions in JSON, distributions in CSV, and the input errors the CLI maps to exit codes."""

from __future__ import annotations

import csv
import io as _io
import json
import math
from pathlib import Path

import jsonschema
import numpy as np

from .arcfamily import ArcFamilySet, field_from_json
from .generators import generate
from .grid import GridFunction, GridSpec, RegionError, SliceGrid
from .polygon import PolygonSet, Ring
from .sets import AngularArcSet, GeometryError, IntervalSet


class InputError(ValueError):
    """Base class for rejected input; ``code`` is the CLI exit status."""

    code = 3
    kind = "input_error"

    def to_json(self) -> dict:
        return {"error": self.kind, "message": str(self)}


class MalformedInput(InputError):
    code = 3
    kind = "malformed_json"


class SchemaViolation(InputError):
    code = 4
    kind = "schema_violation"


class RegionOutsideDomain(InputError):
    code = 5
    kind = "region_outside_domain"


_NUM = {"type": "number"}
_PAIR = {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}
_FIELD = {
    "type": "object",
    "oneOf": [{"required": ["builtin"]}, {"required": ["grid", "values"]}],
}
_ARC = {
    "oneOf": [
        {"type": "null"},
        {
            "type": "object",
            "required": ["center", "ccw"],
            "properties": {"center": _PAIR, "ccw": {"type": "boolean"}},
            "additionalProperties": False,
        },
    ]
}
_RING = {
    "type": "object",
    "required": ["vertices"],
    "properties": {
        "vertices": {"type": "array", "items": _PAIR, "minItems": 1},
        "orientation": {"enum": ["outer", "hole"]},
        "arcs": {"type": "array", "items": _ARC},
    },
    "additionalProperties": False,
}
_INTERVALS = {"type": "array", "items": _PAIR}
SET_SCHEMA = {
    "type": "object",
    "required": ["kind"],
    "oneOf": [
        {
            "properties": {
                "kind": {"const": "polygon"},
                "rings": {"type": "array", "items": _RING, "minItems": 1},
            },
            "required": ["rings"],
            "additionalProperties": False,
        },
        {
            "properties": {
                "kind": {"const": "arc_family"},
                "domain": {
                    "type": "object",
                    "required": ["r"],
                    "properties": {"r": _PAIR, "z": _PAIR},
                    "additionalProperties": False,
                },
                "xi": _FIELD,
                "theta_c": _FIELD,
                "lipschitz_bound": {"type": ["number", "null"]},
            },
            "required": ["domain", "xi"],
            "additionalProperties": False,
        },
        {
            "properties": {
                "kind": {"const": "generator"},
                "name": {"type": "string"},
                "params": {"type": "object"},
            },
            "required": ["name"],
            "additionalProperties": False,
        },
        {
            "properties": {
                "kind": {"const": "slice_grid"},
                "mode": {"enum": ["circular", "steiner"]},
                "grid": {"type": "object", "required": ["domain", "shape"]},
                "slices": {"type": "array", "items": _INTERVALS},
            },
            "required": ["mode", "grid", "slices"],
            "additionalProperties": False,
        },
    ],
}


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialise {type(o).__name__}")


def plain(obj):
    """Recursively turn numpy scalars and arrays into Python values."""
    return json.loads(json.dumps(obj, default=_json_default))


def dumps(obj, indent=2) -> str:
    return json.dumps(obj, indent=indent, default=_json_default, allow_nan=False)


# -- sets ---------------------------------------------------------------


def ring_to_json(ring: Ring) -> dict:
    d = {"vertices": [list(v) for v in ring.vertices], "orientation": ring.orientation}
    if any(a is not None for a in ring.arcs):
        d["arcs"] = [None if a is None else {"center": [a[0], a[1]], "ccw": a[2]} for a in ring.arcs]
    return d


def set_to_json(S) -> dict:
    if isinstance(S, PolygonSet):
        return {"kind": "polygon", "rings": [ring_to_json(r) for r in S.rings]}
    if isinstance(S, ArcFamilySet):
        return plain(S.to_json())
    if isinstance(S, SliceGrid):
        slices = []
        for s in S.cells.flat:
            slices.append([list(p) for p in (s._intervals() if S.mode == "circular" else s.intervals)])
        return {"kind": "slice_grid", "mode": S.mode, "grid": S.grid.to_json(), "slices": slices}
    raise TypeError(f"cannot serialise {type(S).__name__}")


def _ring_from_json(d: dict) -> Ring:
    arcs = d.get("arcs")
    if arcs is not None:
        arcs = tuple(None if a is None else (a["center"][0], a["center"][1], a["ccw"]) for a in arcs)
    return Ring(tuple(tuple(v) for v in d["vertices"]), d.get("orientation", "outer"), arcs)


def _slice_grid_from_json(d: dict) -> SliceGrid:
    grid = GridSpec.from_json(d["grid"])
    n = int(np.prod(grid.shape))
    if len(d["slices"]) != n:
        raise SchemaViolation(f"slice_grid needs {n} slices, got {len(d['slices'])}")
    cells = np.empty(n, dtype=object)
    if d["mode"] == "circular":
        radii = np.repeat(grid.centers(0), n // grid.shape[0])
        for i, (r, s) in enumerate(zip(radii, d["slices"])):
            cells[i] = AngularArcSet(float(r), tuple(tuple(p) for p in s))
    else:
        for i, s in enumerate(d["slices"]):
            cells[i] = IntervalSet(tuple(tuple(p) for p in s))
    return SliceGrid(grid, cells.reshape(grid.shape), d["mode"])


def set_from_json(d) -> object:
    """Build a set from its parsed JSON description.

    Raises :class:`SchemaViolation` for anything that is valid JSON but not
    a valid set.
    """
    try:
        jsonschema.validate(d, SET_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SchemaViolation(f"{exc.message} at {'/'.join(map(str, exc.absolute_path)) or 'top level'}") from None
    try:
        kind = d["kind"]
        if kind == "polygon":
            return PolygonSet(tuple(_ring_from_json(r) for r in d["rings"]))
        if kind == "generator":
            return generate(d["name"], d.get("params"))
        if kind == "slice_grid":
            return _slice_grid_from_json(d)
        dom = [tuple(d["domain"]["r"])]
        if "z" in d["domain"]:
            dom.append(tuple(d["domain"]["z"]))
        theta = field_from_json(d["theta_c"]) if "theta_c" in d else None
        return ArcFamilySet(tuple(dom), field_from_json(d["xi"]), theta, d.get("lipschitz_bound"))
    except SchemaViolation:
        raise
    except (GeometryError, ValueError, TypeError, KeyError, IndexError) as exc:
        raise SchemaViolation(str(exc)) from None


def loads_set(text: str):
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON: {exc}") from None
    return set_from_json(d)


def load_set(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc.strerror}") from None
    return loads_set(text)


# -- distributions ------------------------------------------------------


def read_grid_function(text: str, mode: str = "circular") -> GridFunction:
    """Inverse of :meth:`GridFunction.to_csv` for uniform cell-centred data."""
    rows = list(csv.reader(_io.StringIO(text)))
    if len(rows) < 2:
        raise MalformedInput("distribution CSV has no data rows")
    head, body = rows[0], rows[1:]
    try:
        data = np.array([[float(c) for c in row] for row in body if row])
    except ValueError as exc:
        raise MalformedInput(f"non-numeric CSV entry: {exc}") from None
    if data.ndim != 2 or data.shape[1] != len(head) or len(head) not in (2, 3):
        raise SchemaViolation("distribution CSV needs columns (coord, value) or (coord, coord, value)")
    axes = [np.unique(data[:, a]) for a in range(len(head) - 1)]
    shape = tuple(len(a) for a in axes)
    if math.prod(shape) != len(data):
        raise SchemaViolation("distribution CSV is not a full tensor grid")
    dom = []
    for a in axes:
        h = (a[-1] - a[0]) / max(len(a) - 1, 1) if len(a) > 1 else 1.0
        if len(a) > 1 and not np.allclose(np.diff(a), h, rtol=1e-9, atol=0):
            raise SchemaViolation("distribution CSV is not uniformly spaced")
        dom.append((a[0] - 0.5 * h, a[-1] + 0.5 * h))
    quantity = "mu" if mode == "circular" else "v"
    return GridFunction(GridSpec(tuple(dom), shape), data[:, -1].reshape(shape), mode, quantity)


def check_region_in_domain(region, S):
    """Arc families only exist over their domain; other sources are unbounded."""
    if isinstance(S, ArcFamilySet):
        for (lo, hi), (dlo, dhi) in zip(region.bounds, S.domain):
            if hi < dlo or lo > dhi:
                raise RegionOutsideDomain(f"region side ({lo}, {hi}) misses domain ({dlo}, {dhi})")
    if isinstance(S, SliceGrid):
        for (lo, hi), (dlo, dhi) in zip(region.bounds, S.grid.domain):
            if lo < dlo or hi > dhi:
                raise RegionOutsideDomain(f"region side ({lo}, {hi}) leaves grid domain ({dlo}, {dhi})")
    if region.dim != _set_dim(S):
        raise RegionOutsideDomain(f"region has {region.dim} axes but the set needs {_set_dim(S)}")


def _set_dim(S) -> int:
    if isinstance(S, ArcFamilySet):
        return S.k - 1
    if isinstance(S, SliceGrid):
        return S.grid.dim
    return 1


__all__ = [
    "InputError",
    "MalformedInput",
    "SchemaViolation",
    "RegionOutsideDomain",
    "RegionError",
    "SET_SCHEMA",
    "plain",
    "dumps",
    "set_to_json",
    "set_from_json",
    "loads_set",
    "load_set",
    "read_grid_function",
    "check_region_in_domain",
]
