"""Reading space, curve and null-set files (JSON, ``"schema": 1``) and writing
line-oriented ``key=value`` reports."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .curves import INTERPOLATIONS, Curve, polyline
from .errors import InfmodError, SchemaError
from .instances import cantor_staircase, takagi_path
from .space import Density, NullSetCertificate, Space

SCHEMA = 1


def _load_json(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SchemaError(str(path), f"cannot read file: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from None
    if not isinstance(doc, dict):
        raise SchemaError(str(path), "top level must be an object")
    if doc.get("schema") != SCHEMA:
        raise SchemaError(f"{path}:schema", f"expected schema {SCHEMA}, got {doc.get('schema')!r}")
    return path, doc


def _number(v, loc, positive=False, nonneg=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise SchemaError(loc, f"expected a finite number, got {v!r}")
    if positive and not v > 0:
        raise SchemaError(loc, "must be > 0")
    if nonneg and v < 0:
        raise SchemaError(loc, "must be >= 0")
    return float(v)


def parse_space(doc: dict, where="space") -> Space:
    pts = doc.get("points")
    if not isinstance(pts, list) or not pts:
        raise SchemaError(f"{where}:points", "expected a non-empty list")
    ids, coords = [], []
    for i, p in enumerate(pts):
        loc = f"{where}:points[{i}]"
        if isinstance(p, str):
            ids.append(p)
            coords.append(None)
        elif isinstance(p, dict) and isinstance(p.get("id"), str):
            ids.append(p["id"])
            c = p.get("coords")
            if c is not None:
                if not isinstance(c, list) or not c:
                    raise SchemaError(f"{loc}.coords", "expected a list of numbers")
                c = [_number(v, f"{loc}.coords[{k}]") for k, v in enumerate(c)]
            coords.append(c)
        else:
            raise SchemaError(loc, "expected an id string or an object with an 'id'")
    has_coords = any(c is not None for c in coords)
    forms = [name for name, present in (("coordinates", has_coords), ("edges", "edges" in doc),
                                        ("distances", "distances" in doc)) if present]
    if len(forms) != 1:
        raise SchemaError(where, "exactly one of coordinates, edges, distances is required; "
                          f"found {forms or 'none'}")

    measure = doc.get("measure")
    if measure is None:
        weights = [1.0] * len(ids)
    elif isinstance(measure, dict):
        for k in measure:
            if k not in ids:
                raise SchemaError(f"{where}:measure.{k}", "unknown point")
        missing = [p for p in ids if p not in measure]
        if missing:
            raise SchemaError(f"{where}:measure", f"missing weights for {missing}")
        weights = [_number(measure[p], f"{where}:measure.{p}", nonneg=True) for p in ids]
    else:
        raise SchemaError(f"{where}:measure", "expected an object mapping id -> weight")

    try:
        if has_coords:
            if any(c is None for c in coords):
                raise SchemaError(f"{where}:points", "either every point has coords or none does")
            if len({len(c) for c in coords}) != 1:
                raise SchemaError(f"{where}:points", "coordinates must share one dimension")
            return Space.from_coordinates(ids, np.array(coords), weights)
        if "edges" in doc:
            edges = []
            if not isinstance(doc["edges"], list):
                raise SchemaError(f"{where}:edges", "expected a list")
            for i, e in enumerate(doc["edges"]):
                loc = f"{where}:edges[{i}]"
                if isinstance(e, dict):
                    e = [e.get("u"), e.get("v"), e.get("length")]
                if not (isinstance(e, list) and len(e) == 3 and isinstance(e[0], str)
                        and isinstance(e[1], str)):
                    raise SchemaError(loc, "expected [u, v, length]")
                for end in e[:2]:
                    if end not in ids:
                        raise SchemaError(loc, f"unknown point {end!r}")
                edges.append((e[0], e[1], _number(e[2], f"{loc}.length", positive=True)))
            return Space.from_edges(ids, edges, weights)
        rows = doc["distances"]
        if not isinstance(rows, list) or len(rows) != len(ids):
            raise SchemaError(f"{where}:distances", f"expected {len(ids)} rows")
        mat = []
        for i, r in enumerate(rows):
            if not isinstance(r, list) or len(r) != len(ids):
                raise SchemaError(f"{where}:distances[{i}]", f"expected {len(ids)} entries")
            mat.append([_number(v, f"{where}:distances[{i}][{j}]", nonneg=True)
                        for j, v in enumerate(r)])
        return Space.from_distance_matrix(ids, np.array(mat), weights)
    except SchemaError:
        raise
    except InfmodError as exc:
        raise SchemaError(where, str(exc)) from None


def load_space(path) -> Space:
    path, doc = _load_json(path)
    return parse_space(doc, str(path))


def space_to_dict(space: Space) -> dict:
    doc = {"schema": SCHEMA}
    if space.coords is not None:
        doc["points"] = [{"id": p, "coords": c} for p, c in zip(space.points, space.coords.tolist())]
    else:
        doc["points"] = list(space.points)
    if space.kind == "graph":
        doc["edges"] = [[u, v, w] for u, v, w in space.edges]
    elif space.kind == "distance_matrix":
        doc["distances"] = space.distance_matrix().tolist()
    doc["measure"] = dict(zip(space.points, space.weights.tolist()))
    return doc


def parse_curves(doc: dict, space: Space | None, where="curves") -> list:
    from .essential import simple_paths

    out = []
    curves = doc.get("curves", [])
    if not isinstance(curves, list):
        raise SchemaError(f"{where}:curves", "expected a list")
    for i, c in enumerate(curves):
        loc = f"{where}:curves[{i}]"
        if not isinstance(c, dict) or not isinstance(c.get("nodes"), list):
            raise SchemaError(loc, "expected an object with a 'nodes' list")
        interp = c.get("interpolation")
        if interp is not None and interp not in INTERPOLATIONS:
            raise SchemaError(f"{loc}.interpolation", f"must be one of {INTERPOLATIONS}")
        nodes = c["nodes"]
        try:
            if nodes and all(isinstance(n, str) for n in nodes):
                if space is None:
                    raise SchemaError(loc, "point-id nodes need a --space")
                params = c.get("params")
                if params is None:
                    out.append(Curve.from_path(space, nodes))
                else:
                    out.append(Curve(params, nodes, interp, space))
            else:
                if space is not None and space.coords is None:
                    raise SchemaError(loc, "coordinate nodes need an embedded space")
                params = c.get("params")
                if params is None:
                    out.append(polyline(nodes, space))
                else:
                    out.append(Curve(params, nodes, interp, space))
        except SchemaError:
            raise
        except (InfmodError, ValueError, TypeError) as exc:
            raise SchemaError(loc, str(exc)) from None
    gens = doc.get("generators", [])
    if not isinstance(gens, list):
        raise SchemaError(f"{where}:generators", "expected a list")
    for i, g in enumerate(gens):
        loc = f"{where}:generators[{i}]"
        if isinstance(g, dict) and "all_paths" in g:
            opts = g["all_paths"]
            if space is None or space.kind == "embedding":
                raise SchemaError(loc, "all_paths needs a graph or distance-matrix space")
            try:
                hops = opts.get("max_hops")
                for p in simple_paths(space, opts["from"], opts["to"], hops):
                    out.append(Curve.from_path(space, p))
            except (KeyError, AttributeError):
                raise SchemaError(loc, "all_paths needs 'from' and 'to' point ids") from None
            except InfmodError as exc:
                raise SchemaError(loc, str(exc)) from None
        elif isinstance(g, dict) and "cantor_staircase" in g:
            level = g["cantor_staircase"].get("level") if isinstance(g["cantor_staircase"], dict) else None
            if not isinstance(level, int) or not 0 <= level <= 20:
                raise SchemaError(loc, "cantor_staircase needs an integer level in [0, 20]")
            out.append(cantor_staircase(level))
        elif isinstance(g, dict) and "takagi" in g:
            opts = g["takagi"] if isinstance(g["takagi"], dict) else {}
            terms = opts.get("terms", 48)
            if not isinstance(terms, int) or not 1 <= terms <= 60:
                raise SchemaError(loc, "takagi terms must be an integer in [1, 60]")
            exponent = _number(opts.get("exponent", 0.5), f"{loc}.exponent", positive=True)
            out.append(Curve([0.0, 1.0], path=takagi_path(terms, exponent)))
        else:
            raise SchemaError(loc, "unknown generator (expected all_paths, cantor_staircase "
                              "or takagi)")
    return out


def load_curves(path, space: Space | None) -> list:
    path, doc = _load_json(path)
    return parse_curves(doc, space, str(path))


def curves_to_dict(curves) -> dict:
    out = []
    for c in curves:
        nodes = list(c.nodes) if c.is_discrete else c.nodes.tolist()
        out.append({"params": c.params.tolist(), "nodes": nodes, "interpolation": c.interpolation})
    return {"schema": SCHEMA, "curves": out}


def parse_nullsets(doc: dict, space: Space, where="nullsets") -> list:
    sets = doc.get("nullsets")
    if not isinstance(sets, list):
        raise SchemaError(f"{where}:nullsets", "expected a list")
    out = []
    for i, s in enumerate(sets):
        loc = f"{where}:nullsets[{i}]"
        if isinstance(s, dict):
            s = s.get("points")
        if not isinstance(s, list) or not all(isinstance(p, str) for p in s):
            raise SchemaError(loc, "expected a list of point ids")
        for p in s:
            if p not in space:
                raise SchemaError(loc, f"unknown point {p!r}")
            if space.weight(p) != 0:
                raise SchemaError(loc, f"point {p!r} has positive measure {space.weight(p)}")
        out.append(NullSetCertificate(s, space))
    return out


def load_nullsets(path, space: Space) -> list:
    path, doc = _load_json(path)
    return parse_nullsets(doc, space, str(path))


# reports ---------------------------------------------------------------------

def fmt(v) -> str:
    """Deterministic scalar formatting; +inf prints as ``inf``."""
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    if isinstance(v, Density):
        return ",".join(fmt(x) for x in v.values)
    if isinstance(v, NullSetCertificate):
        return ",".join(sorted(v.point_ids)) or "-"
    if isinstance(v, (list, tuple)):
        return ",".join(fmt(x) for x in v)
    return str(v)


class Report:
    """Ordered key/value pairs rendered as ``key=value`` lines or aligned text."""

    def __init__(self):
        self.items = []

    def add(self, key, value):
        self.items.append((key, value))

    def structured(self) -> str:
        lines = [f"schema={SCHEMA}"] + [f"{k}={fmt(v)}" for k, v in self.items]
        return "\n".join(lines) + "\n"

    def text(self) -> str:
        if not self.items:
            return ""
        width = max(len(k) for k, _ in self.items)
        return "\n".join(f"{k.ljust(width)}  {fmt(v)}" for k, v in self.items) + "\n"

    def render(self, fmt_name: str) -> str:
        return self.structured() if fmt_name == "structured" else self.text()


def columns(header, rows) -> str:
    """Whitespace-separated column text for plotting."""
    out = ["# " + " ".join(header)]
    out += [" ".join(fmt(v) for v in r) for r in rows]
    return "\n".join(out) + "\n"
