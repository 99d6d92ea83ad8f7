"""Curves over a space: length, the length function, arc-length
reparametrization, line integrals and occupation measures.

A curve is sampled at strictly increasing parameters ``t_0 < ... < t_M``.
Between samples it is interpolated according to the geometry of its space:

* ``geodesic``: straight segments in R^n (embedded spaces, or free-standing
  curves with no space).  A vectorized ``path`` callable may be attached, in
  which case the samples are only the starting partition and the length is
  found by dyadic refinement.
* ``edge-walk``: consecutive nodes are equal (a pause) or joined by a graph
  edge; the edge is traversed at constant speed.
* ``discrete-chain``: consecutive nodes of a distance-matrix space, each step
  having length ``d(u, v)``.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable, Iterable

import numpy as np

from .errors import InvalidCurveError, NonRectifiableError
from .space import EMBEDDING, GRAPH, MATRIX, Density, NullSetCertificate, Space

GEODESIC = "geodesic"
EDGE_WALK = "edge-walk"
CHAIN = "discrete-chain"
INTERPOLATIONS = (GEODESIC, EDGE_WALK, CHAIN)

DEFAULT_TOL = 1e-9
DEFAULT_MAX_SEGMENTS = 2 ** 20

_FOR_KIND = {EMBEDDING: GEODESIC, GRAPH: EDGE_WALK, MATRIX: CHAIN}


class Curve:
    """An immutable sampled curve.

    ``nodes`` are coordinates (geodesic) or point ids (edge-walk, chain).
    Curves compare and hash by value, so they can be collected in sets.
    """

    def __init__(self, params, nodes=None, interpolation=None, space: Space | None = None,
                 path: Callable | None = None):
        t = np.array(params, dtype=float)
        if t.ndim != 1 or len(t) < 2:
            raise InvalidCurveError("a curve needs at least two parameter samples")
        if not np.all(np.isfinite(t)) or np.any(np.diff(t) <= 0):
            raise InvalidCurveError("parameters must be finite and strictly increasing")
        if interpolation is None:
            interpolation = _FOR_KIND[space.kind] if space is not None else GEODESIC
        if interpolation not in INTERPOLATIONS:
            raise InvalidCurveError(f"unknown interpolation {interpolation!r}")
        if space is not None and _FOR_KIND[space.kind] != interpolation:
            raise InvalidCurveError(
                f"{interpolation} curves do not fit a {space.kind} space")
        if interpolation != GEODESIC and space is None:
            raise InvalidCurveError(f"{interpolation} curves need a space")
        if path is not None and interpolation != GEODESIC:
            raise InvalidCurveError("only geodesic curves can carry a path function")

        if interpolation == GEODESIC:
            if nodes is None:
                if path is None:
                    raise InvalidCurveError("need nodes or a path function")
                nodes = path(t)
            x = np.array(nodes, dtype=float)
            if x.ndim == 1:
                x = x.reshape(-1, 1)
            if x.shape[0] != len(t):
                raise InvalidCurveError("one node per parameter sample is required")
            if space is not None and x.shape[1] != space.coords.shape[1]:
                raise InvalidCurveError("node dimension does not match the space")
            if not np.all(np.isfinite(x)):
                raise InvalidCurveError("nodes must be finite")
            if path is None and np.all(x == x[0]):
                raise InvalidCurveError("curve is constant")
            x.setflags(write=False)
            self._nodes = x
        else:
            ids = tuple(str(p) for p in nodes)
            if len(ids) != len(t):
                raise InvalidCurveError("one node per parameter sample is required")
            ix = [space.index(p) for p in ids]
            if all(i == ix[0] for i in ix):
                raise InvalidCurveError("curve is constant")
            if interpolation == EDGE_WALK:
                for i, j in zip(ix, ix[1:]):
                    if i != j and not math.isfinite(space.edge_length(i, j)):
                        raise InvalidCurveError(
                            f"no edge between {space.points[i]!r} and {space.points[j]!r}")
            self._nodes = ids
            self._ix = np.array(ix)
        t.setflags(write=False)
        self._params = t
        self._interp = interpolation
        self._space = space
        self._path = path

    @classmethod
    def from_path(cls, space: Space, vertices, params=None):
        """Discrete curve through ``vertices``; parametrized by arc length by default."""
        vertices = [str(v) for v in vertices]
        c = cls(np.arange(len(vertices), dtype=float) if params is None else params,
                vertices, space=space)
        if params is None:
            steps = c.segment_lengths()
            if np.all(steps > 0):
                c = cls(np.concatenate([[0.0], np.cumsum(steps)]), vertices, space=space)
        return c

    # accessors ------------------------------------------------------------

    @property
    def params(self) -> np.ndarray:
        return self._params

    @property
    def nodes(self):
        return self._nodes

    @property
    def interpolation(self) -> str:
        return self._interp

    @property
    def space(self):
        return self._space

    @property
    def path(self):
        return self._path

    @property
    def is_discrete(self) -> bool:
        return self._interp != GEODESIC

    @property
    def a(self) -> float:
        return float(self._params[0])

    @property
    def b(self) -> float:
        return float(self._params[-1])

    @property
    def start(self):
        return self._nodes[0] if self.is_discrete else tuple(self._nodes[0])

    @property
    def end(self):
        return self._nodes[-1] if self.is_discrete else tuple(self._nodes[-1])

    def __len__(self):
        return len(self._params)

    @cached_property
    def key(self):
        nodes = self._nodes if self.is_discrete else self._nodes.tobytes()
        return (self._interp, self._params.tobytes(), nodes, id(self._path) if self._path else None)

    def __eq__(self, other):
        return isinstance(other, Curve) and self.key == other.key and self._space is other._space

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        if self.is_discrete:
            return f"Curve({'-'.join(self._nodes)})"
        return f"Curve({self._interp}, {len(self)} samples on [{self.a:g}, {self.b:g}])"

    def segment_lengths(self) -> np.ndarray:
        """Lengths of the interpolating segments between consecutive samples."""
        if self._interp == GEODESIC:
            return np.linalg.norm(np.diff(self._nodes, axis=0), axis=1)
        sp, ix = self._space, self._ix
        if self._interp == EDGE_WALK:
            return np.array([0.0 if i == j else sp.edge_length(i, j)
                             for i, j in zip(ix[:-1], ix[1:])])
        return np.array([sp.distance_ix(i, j) for i, j in zip(ix[:-1], ix[1:])])

    def node_indices(self) -> np.ndarray:
        """Space indices of the nodes (discrete curves only)."""
        return self._ix


@dataclass(frozen=True, eq=False)
class LengthProfile:
    """The length function sampled on the final partition.

    ``history`` lists the partition sums of each refinement round.
    """

    breakpoints: np.ndarray
    cumulative: np.ndarray
    total: float
    history: tuple = field(default=())

    def __call__(self, s):
        """Evaluate the length function (linear between breakpoints)."""
        return np.interp(s, self.breakpoints, self.cumulative)


def _partition_sum(pts):
    return math.fsum(np.linalg.norm(np.diff(pts, axis=0), axis=1))


def _refine(curve: Curve, tol: float, max_segments: int):
    """Dyadic refinement of a path curve; returns (params, points, history)."""
    ts = curve.params
    pts = np.asarray(curve.path(ts), dtype=float).reshape(len(ts), -1)
    est = _partition_sum(pts)
    history = [est]
    while True:
        if len(ts) - 1 >= max_segments:
            raise NonRectifiableError(
                f"length not settled after {len(ts) - 1} segments; possibly non-rectifiable",
                lower_bound=est, segments=len(ts) - 1)
        mid = 0.5 * (ts[:-1] + ts[1:])
        new_ts = np.empty(2 * len(ts) - 1)
        new_ts[0::2] = ts
        new_ts[1::2] = mid
        mid_pts = np.asarray(curve.path(mid), dtype=float).reshape(len(mid), -1)
        new_pts = np.empty((len(new_ts), pts.shape[1]))
        new_pts[0::2] = pts
        new_pts[1::2] = mid_pts
        new_est = _partition_sum(new_pts)
        history.append(new_est)
        ts, pts = new_ts, new_pts
        if new_est > 0 and new_est - est < tol * new_est:
            return ts, pts, tuple(history)
        est = new_est


@lru_cache(maxsize=1024)
def _resolved(curve: Curve, tol: float, max_segments: int):
    """Final polyline partition: (params, nodes, segment lengths, history)."""
    if curve.path is not None:
        ts, pts, history = _refine(curve, tol, max_segments)
        seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        if not np.any(seg > 0):
            raise InvalidCurveError("curve is constant")
        return ts, pts, seg, history
    seg = curve.segment_lengths()
    total = math.fsum(seg)
    if curve.interpolation == GEODESIC:
        # Midpoint insertion on straight segments cannot add length.
        mid = 0.5 * (curve.nodes[:-1] + curve.nodes[1:])
        halves = (np.linalg.norm(mid - curve.nodes[:-1], axis=1)
                  + np.linalg.norm(curve.nodes[1:] - mid, axis=1))
        refined = math.fsum(halves)
        assert abs(refined - total) <= 1e-12 * max(total, 1.0), (refined, total)
        history = (total, refined)
    else:
        history = (total,)
    return curve.params, curve.nodes, seg, history


def compute_length(curve: Curve, tol: float = DEFAULT_TOL,
                   max_segments: int = DEFAULT_MAX_SEGMENTS):
    """Length of ``curve`` and its length profile.

    Polyline and discrete curves are exact.  Path curves are refined dyadically
    until a round raises the estimate by less than ``tol`` (relative); the
    returned value is a lower bound of the supremum over partitions.  Raises
    ``NonRectifiableError`` when ``max_segments`` is reached first.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    ts, _, seg, history = _resolved(curve, tol, max_segments)
    total = math.fsum(seg)
    cum = np.minimum(np.concatenate([[0.0], np.cumsum(seg)]), total)
    cum[-1] = total
    return total, LengthProfile(ts, cum, total, history)


def length_inverse(profile: LengthProfile, t: float) -> float:
    """Largest parameter ``s`` with ``s_gamma(s) = t``.

    Flat stretches of the length function resolve to their right end.
    """
    cum = profile.cumulative
    if not 0.0 <= t <= profile.total:
        raise ValueError(f"t={t} outside [0, {profile.total}]")
    j = bisect.bisect_right(cum, t) - 1
    j = min(j, len(cum) - 1)
    if cum[j] == t or j == len(cum) - 1:
        return float(profile.breakpoints[j])
    lo, hi = cum[j], cum[j + 1]
    s0, s1 = profile.breakpoints[j], profile.breakpoints[j + 1]
    return float(s0 + (t - lo) / (hi - lo) * (s1 - s0))


def arc_length_parametrize(curve: Curve, tol: float = DEFAULT_TOL,
                           max_segments: int = DEFAULT_MAX_SEGMENTS) -> Curve:
    """The unit-speed reparametrization on ``[0, length]``.

    Pauses (zero-length steps) disappear; path curves come back as the
    polyline through their final refinement.
    """
    ts, nodes, seg, _ = _resolved(curve, tol, max_segments)
    keep = np.concatenate([[True], seg > 0])
    cum = np.concatenate([[0.0], np.cumsum(seg)])[keep]
    if curve.is_discrete:
        kept = [n for n, k in zip(nodes, keep) if k]
    else:
        kept = np.asarray(nodes)[keep]
    return Curve(cum, kept, curve.interpolation, curve.space)


def evaluate(curve: Curve, t):
    """Position of the curve at parameter(s) ``t``.

    Geodesic curves return coordinates; discrete curves return the point id
    owning that instant under the nearest-point rule.
    """
    scalar = np.ndim(t) == 0
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(tt < curve.a) or np.any(tt > curve.b):
        raise ValueError("parameter outside the curve's interval")
    if curve.interpolation == GEODESIC:
        if curve.path is not None:
            out = np.asarray(curve.path(tt), dtype=float).reshape(len(tt), -1)
        else:
            out = np.column_stack([np.interp(tt, curve.params, curve.nodes[:, k])
                                   for k in range(curve.nodes.shape[1])])
        return out[0] if scalar else out
    p = curve.params
    out = []
    for x in tt:
        i = min(np.searchsorted(p, x, side="right") - 1, len(p) - 2)
        frac = (x - p[i]) / (p[i + 1] - p[i])
        out.append(curve.nodes[i] if frac < 0.5 else curve.nodes[i + 1])
    return out[0] if scalar else out


# concatenation and friends ---------------------------------------------------

def _check_polyline(c):
    if c.path is not None:
        raise InvalidCurveError("reparametrize path curves before combining them")


def concatenate(alpha: Curve, beta: Curve) -> Curve:
    """``alpha`` followed by ``beta``; beta's parameters are shifted to follow on."""
    _check_polyline(alpha)
    _check_polyline(beta)
    if alpha.interpolation != beta.interpolation or alpha.space is not beta.space:
        raise InvalidCurveError("curves live in different spaces")
    if alpha.end != beta.start:
        raise InvalidCurveError("alpha must end where beta starts")
    params = np.concatenate([alpha.params, beta.params[1:] - beta.a + alpha.b])
    if alpha.is_discrete:
        nodes = list(alpha.nodes) + list(beta.nodes[1:])
    else:
        nodes = np.vstack([alpha.nodes, beta.nodes[1:]])
    return Curve(params, nodes, alpha.interpolation, alpha.space)


def reverse(curve: Curve) -> Curve:
    _check_polyline(curve)
    params = (curve.a + curve.b) - curve.params[::-1]
    nodes = list(curve.nodes[::-1]) if curve.is_discrete else curve.nodes[::-1]
    return Curve(params, nodes, curve.interpolation, curve.space)


def subcurve(curve: Curve, i: int, j: int) -> Curve:
    """Restriction to the samples ``i..j`` (inclusive)."""
    _check_polyline(curve)
    if not 0 <= i < j < len(curve):
        raise IndexError("need 0 <= i < j < number of samples")
    nodes = list(curve.nodes[i:j + 1]) if curve.is_discrete else curve.nodes[i:j + 1]
    return Curve(curve.params[i:j + 1], nodes, curve.interpolation, curve.space)


def is_subcurve(sigma: Curve, gamma: Curve) -> bool:
    """Whether ``sigma`` traces a contiguous stretch of ``gamma`` (either direction)."""
    if sigma.interpolation != gamma.interpolation or sigma.space is not gamma.space:
        return False
    s = arc_length_parametrize(sigma)
    g = arc_length_parametrize(gamma)
    if s.is_discrete:
        a, b = list(s.nodes), list(g.nodes)
    else:
        a, b = [tuple(r) for r in s.nodes], [tuple(r) for r in g.nodes]
    m = len(a)
    return any(b[k:k + m] in (a, a[::-1]) for k in range(len(b) - m + 1))


# occupation measures -----------------------------------------------------------

def _voronoi_split(p0, p1, pts):
    """Split the segment p0->p1 into (point index, s_start, s_end) pieces by
    nearest point, ``s`` being the fraction along the segment.

    Squared distance to q along the segment is a quadratic whose leading
    term is common to all q, so the nearest point follows the lower envelope
    of the lines ``|p0-q|^2 + 2 s (p0-q).(p1-p0)``.
    """
    d = p1 - p0
    diff = p0 - pts
    icpt = np.einsum("ij,ij->i", diff, diff)
    slope = 2.0 * (diff @ d)
    lo = icpt.min()
    cand = np.nonzero(icpt == lo)[0]
    cur = int(cand[np.lexsort((cand, slope[cand]))[0]])
    s = 0.0
    pieces = []
    while True:
        below = np.nonzero(slope < slope[cur])[0]
        if len(below) == 0:
            pieces.append((cur, s, 1.0))
            return pieces
        cross = (icpt[below] - icpt[cur]) / (slope[cur] - slope[below])
        cross = np.maximum(cross, s)
        m = cross.min()
        if m >= 1.0:
            pieces.append((cur, s, 1.0))
            return pieces
        tied = below[cross == m]
        nxt = int(tied[np.lexsort((tied, slope[tied]))[0]])
        if m > s:
            pieces.append((cur, s, m))
        s, cur = m, nxt


@dataclass(frozen=True, eq=False)
class Occupation:
    """Arc length and parameter time the curve spends in each point's cell."""

    length: np.ndarray
    time: np.ndarray


@lru_cache(maxsize=4096)
def occupation(curve: Curve, tol: float = DEFAULT_TOL,
               max_segments: int = DEFAULT_MAX_SEGMENTS) -> Occupation:
    """Per-point occupation measures of ``curve`` under the nearest-point rule."""
    sp = curve.space
    if sp is None:
        raise ValueError("occupation needs a curve attached to a space")
    n = len(sp)
    L = np.zeros(n)
    T = np.zeros(n)
    ts, nodes, seg, _ = _resolved(curve, tol, max_segments)
    dt = np.diff(ts)
    if curve.is_discrete:
        ix = curve.node_indices()
        for k in range(len(seg)):
            i, j = ix[k], ix[k + 1]
            if seg[k] == 0:
                T[i] += dt[k]
                continue
            L[i] += 0.5 * seg[k]
            L[j] += 0.5 * seg[k]
            T[i] += 0.5 * dt[k]
            T[j] += 0.5 * dt[k]
    else:
        pts = sp.coords
        for k in range(len(seg)):
            if seg[k] == 0:
                T[sp.nearest_index(nodes[k])] += dt[k]
                continue
            for q, s0, s1 in _voronoi_split(nodes[k], nodes[k + 1], pts):
                L[q] += (s1 - s0) * seg[k]
                T[q] += (s1 - s0) * dt[k]
    L.setflags(write=False)
    T.setflags(write=False)
    return Occupation(L, T)


def _region_measure(curve, region, tol, max_segments, samples):
    """(arc length, time) the curve spends where ``region(points)`` is true.

    ``region`` is evaluated at sub-segment midpoints; pauses use their node.
    """
    ts, nodes, seg, _ = _resolved(curve, tol, max_segments)
    nodes = np.asarray(nodes)
    dt = np.diff(ts)
    fr = (np.arange(samples) + 0.5) / samples
    p0, p1 = nodes[:-1], nodes[1:]
    pts = p0[:, None, :] + fr[None, :, None] * (p1 - p0)[:, None, :]
    inside = np.asarray(region(pts.reshape(-1, nodes.shape[1])), dtype=float)
    frac = inside.reshape(len(seg), samples).mean(axis=1)
    return float(np.dot(frac, seg)), float(np.dot(frac, dt))


def _resolve_set(curve, F):
    if callable(F):
        return F
    ids = F.point_ids if isinstance(F, NullSetCertificate) else F
    mask = np.zeros(len(curve.space), dtype=bool)
    for p in ids:
        mask[curve.space.index(p)] = True
    return mask


def measure_in(curve: Curve, F, tol: float = DEFAULT_TOL,
               max_segments: int = DEFAULT_MAX_SEGMENTS, samples: int = 1):
    """``(m1(gamma_s^{-1}(F)), m1(gamma^{-1}(F)))`` for a point set or region.

    ``F`` is an iterable of point ids, a ``NullSetCertificate``, or a
    vectorized predicate over coordinates (geodesic curves only).
    """
    F = _resolve_set(curve, F)
    if callable(F):
        if curve.is_discrete:
            raise TypeError("region predicates need a geodesic curve")
        return _region_measure(curve, F, tol, max_segments, samples)
    occ = occupation(curve, tol, max_segments)
    return float(occ.length[F].sum()), float(occ.time[F].sum())


def positive_length_in(curve: Curve, F, tol: float = 1e-12, *, length_tol: float = DEFAULT_TOL,
                       samples: int = 1) -> bool:
    """Whether the arc-length preimage of ``F`` exceeds ``tol * length``."""
    m_len, _ = measure_in(curve, F, length_tol, samples=samples)
    total, _ = compute_length(curve, length_tol)
    return m_len > tol * total


def positive_time_in(curve: Curve, F, tol: float = 1e-12, *, length_tol: float = DEFAULT_TOL,
                     samples: int = 1) -> bool:
    """Whether the parameter preimage of ``F`` exceeds ``tol * (b - a)``."""
    _, m_time = measure_in(curve, F, length_tol, samples=samples)
    return m_time > tol * (curve.b - curve.a)


def line_integral(curve: Curve, rho, tol: float = DEFAULT_TOL,
                  max_segments: int = DEFAULT_MAX_SEGMENTS, samples: int = 1) -> float:
    """Integral of ``rho`` along the arc-length parametrization.

    ``rho`` is a ``Density`` on the curve's space (assigned by nearest point)
    or, for geodesic curves, a vectorized function of coordinates evaluated
    by a ``samples``-point midpoint rule on each segment.
    """
    if isinstance(rho, Density):
        if rho.space is not curve.space:
            raise ValueError("density and curve live on different spaces")
        occ = occupation(curve, tol, max_segments)
        return float(np.dot(occ.length, rho.values))
    if curve.is_discrete:
        raise TypeError("function densities need a geodesic curve")
    ts, nodes, seg, _ = _resolved(curve, tol, max_segments)
    nodes = np.asarray(nodes)
    fr = (np.arange(samples) + 0.5) / samples
    p0, p1 = nodes[:-1], nodes[1:]
    pts = p0[:, None, :] + fr[None, :, None] * (p1 - p0)[:, None, :]
    vals = np.asarray(rho(pts.reshape(-1, nodes.shape[1])), dtype=float)
    return float(np.dot(vals.reshape(len(seg), samples).mean(axis=1), seg))


def polyline(points: Iterable, space: Space | None = None, params=None) -> Curve:
    """Geodesic curve through ``points``; arc-length parametrized by default."""
    pts = np.array(points, dtype=float)
    if params is None:
        steps = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        params = np.concatenate([[0.0], np.cumsum(steps)]) if np.all(steps > 0) \
            else np.arange(len(pts), dtype=float)
    return Curve(params, pts, GEODESIC, space)
