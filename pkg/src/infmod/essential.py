"""The essential metric and the De Cecco-Palmieri metrics d_N and d-hat."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .curves import Curve, reverse
from .errors import ConsistencyError
from .modulus import CurveFamily, _as_certs, _mask_cert, ess_length
from .space import EMBEDDING, GRAPH, MATRIX, NullSetCertificate, Space, null_mask

INF = math.inf
RTOL = 1e-9
AXIOM_POINT_LIMIT = 64


def simple_paths(space: Space, x, y, max_hops=None):
    """All simple vertex sequences from ``x`` to ``y`` with at most ``max_hops`` steps.

    Graph spaces follow edges; distance-matrix spaces use every pair.
    """
    n = len(space)
    max_hops = n - 1 if max_hops is None else max_hops
    s, t = space.index(x), space.index(y)
    if space.kind == GRAPH:
        nbrs = {i: sorted({j for j, _ in space.neighbors(i)}) for i in range(n)}
    else:
        nbrs = {i: [j for j in range(n) if j != i] for i in range(n)}
    out = []
    stack = [s]
    on_path = {s}

    def walk(u):
        if u == t:
            out.append([space.points[i] for i in stack])
            return
        if len(stack) - 1 >= max_hops:
            return
        for v in nbrs[u]:
            if v not in on_path:
                stack.append(v)
                on_path.add(v)
                walk(v)
                stack.pop()
                on_path.discard(v)

    walk(s)
    return out


def _same_point(space, node, p):
    if space.kind == EMBEDDING:
        return bool(np.allclose(node, space.coords[space.index(p)], rtol=0, atol=1e-12))
    return node == p


def connecting_family(space: Space, x, y, max_hops=None, curves=None) -> CurveFamily:
    """Curves joining ``x`` to ``y``.

    Graph spaces, and distance-matrix spaces without ``curves``, enumerate
    simple paths.  Otherwise the supplied curves whose endpoints are
    ``{x, y}`` are kept, reversed where needed so all run from ``x``.
    """
    if x == y:
        raise ValueError("a connecting family needs two distinct points")
    space.index(x), space.index(y)
    name = f"G({x},{y})"
    if space.kind == GRAPH or (space.kind == MATRIX and curves is None):
        paths = simple_paths(space, x, y, max_hops)
        return CurveFamily(space, [Curve.from_path(space, p) for p in paths], name)
    keep = []
    for c in curves or ():
        if c.space is not space:
            continue
        if _same_point(space, c.start, x) and _same_point(space, c.end, y):
            keep.append(c)
        elif _same_point(space, c.start, y) and _same_point(space, c.end, x):
            keep.append(reverse(c))
    return CurveFamily(space, keep, name)


def d_ess(space: Space, x, y, certs=(), max_hops=None, curves=None, canonical=True) -> float:
    """Essential distance: the essential length of the connecting family."""
    if x == y:
        return 0.0
    return ess_length(connecting_family(space, x, y, max_hops, curves), certs, canonical)


def _d_n(fam: CurveFamily, mask):
    """(inf length over curves with no length in the masked set, achieving curve)."""
    if not fam.rectifiable:
        return INF, None
    ok = ~fam.covered(mask)
    if not ok.any():
        return INF, None
    lengths = np.where(ok, fam.lengths, INF)
    k = int(np.argmin(lengths))
    return float(lengths[k]), fam.rectifiable[k]


def d_N(space: Space, x, y, N: NullSetCertificate, max_hops=None, curves=None) -> float:
    """Shortest connecting curve that spends no length in the null set ``N``."""
    if x == y:
        return 0.0
    fam = connecting_family(space, x, y, max_hops, curves)
    return _d_n(fam, null_mask(space, [N], canonical=False))[0]


@dataclass
class EssentialDistanceResult:
    x: str
    y: str
    d: float
    d_ess: float
    d_hat: float
    witnessing_null_set: NullSetCertificate | None = None
    witnessing_curve: Curve | None = None


def _agree(a, b):
    if a == INF or b == INF:
        return a == b
    return abs(a - b) <= RTOL * max(abs(a), abs(b), 1e-300)


def d_hat(space: Space, x, y, certs=(), max_hops=None, curves=None, canonical=True,
          family: CurveFamily | None = None) -> EssentialDistanceResult:
    """Supremum of ``d_N`` over the empty set, each certificate and the union
    of all null sets in play, checked against ``d_ess``.

    Raises ``ConsistencyError`` when the two disagree.
    """
    certs = _as_certs(certs)
    d = space.distance(x, y)
    if x == y:
        return EssentialDistanceResult(x, y, 0.0, 0.0, 0.0)
    fam = family if family is not None else connecting_family(space, x, y, max_hops, curves)
    empty = NullSetCertificate((), space)
    candidates = [empty] + certs + [_mask_cert(space, null_mask(space, certs, canonical))]
    best, best_n, best_curve = -1.0, None, None
    for N in candidates:
        value, curve = _d_n(fam, null_mask(space, [N], canonical=False))
        if value > best:
            best, best_n, best_curve = value, N, curve
    essl = ess_length(fam, certs, canonical)
    if not _agree(best, essl):
        raise ConsistencyError(f"d_hat({x},{y})={best!r} but d_ess={essl!r}")
    return EssentialDistanceResult(x, y, d, essl, best, best_n, best_curve)


def essential_matrix(space: Space, certs=(), max_hops=None, curves=None, canonical=True):
    """``EssentialDistanceResult`` for every ordered pair of points."""
    out = {}
    for x in space.points:
        for y in space.points:
            out[x, y] = d_hat(space, x, y, certs, max_hops, curves, canonical)
    return out


@dataclass
class MetricReport:
    checks: int = 0
    violations: list = field(default_factory=list)
    results: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_metric_axioms(space: Space, certs=(), max_hops=None, curves=None,
                        canonical=True, tol: float = RTOL) -> MetricReport:
    """Exhaustively check that ``d_ess`` is an extended metric dominating ``d``."""
    if len(space) > AXIOM_POINT_LIMIT:
        raise ValueError(f"exhaustive check limited to {AXIOM_POINT_LIMIT} points")
    res = essential_matrix(space, certs, max_hops, curves, canonical)
    report = MetricReport(results=res)
    pts = space.points
    D = {k: r.d_ess for k, r in res.items()}
    for x in pts:
        report.checks += 1
        if D[x, x] != 0:
            report.violations.append(f"d_ess({x},{x}) = {D[x, x]} != 0")
    for x, y in itertools.permutations(pts, 2):
        report.checks += 3
        if D[x, y] != D[y, x]:
            report.violations.append(f"asymmetric: d_ess({x},{y})={D[x, y]} d_ess({y},{x})={D[y, x]}")
        d = space.distance(x, y)
        if not d > 0:
            report.violations.append(f"d({x},{y}) = {d} not positive")
        if D[x, y] < d * (1 - tol):
            report.violations.append(f"d_ess({x},{y})={D[x, y]} < d={d}")
    for a, b, c in itertools.permutations(pts, 3):
        report.checks += 1
        lhs, rhs = D[a, b], D[a, c] + D[c, b]
        if rhs == INF:
            continue
        if lhs > rhs * (1 + tol):
            report.violations.append(
                f"triangle: d_ess({a},{b})={lhs} > d_ess({a},{c})+d_ess({c},{b})={rhs}")
    return report
