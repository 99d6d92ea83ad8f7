"""Discretized metric measure spaces, densities and null-set certificates.

A space is a finite set of named points with a metric given in one of three
forms (Euclidean coordinates, an explicit distance matrix, or a weighted
graph whose metric is the shortest-path length) and an atomic measure: one
nonnegative weight per point.
"""

from __future__ import annotations

import heapq
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InvalidSpaceError, UnknownPointError

INF = math.inf

EMBEDDING = "embedding"
MATRIX = "distance_matrix"
GRAPH = "graph"

# Above this many points the triangle inequality is checked on random triples.
EXHAUSTIVE_LIMIT = 200


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


class Space:
    """A finite metric measure space.

    Use the ``from_coordinates``, ``from_distance_matrix`` or ``from_edges``
    constructors.  Instances are immutable; graph distances are computed on
    demand and cached per source point.
    """

    def __init__(self, points, measure, kind, *, coords=None, matrix=None,
                 edges=None, validate=True):
        ids = tuple(str(p) for p in points)
        if not ids:
            raise InvalidSpaceError("a space needs at least one point")
        if len(set(ids)) != len(ids):
            raise InvalidSpaceError("duplicate point identifiers")
        self._ids = ids
        self._index = {p: i for i, p in enumerate(ids)}

        if isinstance(measure, Mapping):
            missing = [p for p in ids if p not in measure]
            if missing:
                raise InvalidSpaceError(f"no measure weight for points {missing}")
            extra = [p for p in measure if str(p) not in self._index]
            if extra:
                raise UnknownPointError(f"measure given for unknown points {extra}")
            weights = [measure[p] for p in ids]
        else:
            weights = list(measure)
        w = _readonly(weights)
        if w.shape != (len(ids),):
            raise InvalidSpaceError("measure must have one weight per point")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise InvalidSpaceError("measure weights must be finite and >= 0")
        if not np.any(w > 0):
            raise InvalidSpaceError("at least one point must have positive measure")
        self._weights = w
        self._kind = kind
        self._coords = None
        self._matrix = None
        self._adj = None
        self._edge_len = None
        self._cache = {}
        self._lock = threading.Lock()

        if kind == EMBEDDING:
            c = _readonly(coords)
            if c.ndim == 1:
                c = _readonly(c.reshape(-1, 1))
            if c.ndim != 2 or c.shape[0] != len(ids):
                raise InvalidSpaceError("coordinates must be an (n, dim) array")
            if not np.all(np.isfinite(c)):
                raise InvalidSpaceError("coordinates must be finite")
            if len({tuple(row) for row in c.tolist()}) != len(ids):
                raise InvalidSpaceError("distinct points must have distinct coordinates")
            self._coords = c
        elif kind == MATRIX:
            m = _readonly(matrix)
            if m.shape != (len(ids), len(ids)):
                raise InvalidSpaceError("distance matrix must be n x n")
            self._matrix = m
        elif kind == GRAPH:
            adj = {i: [] for i in range(len(ids))}
            best = {}
            for u, v, length in edges:
                i, j = self.index(u), self.index(v)
                length = float(length)
                if i == j:
                    raise InvalidSpaceError(f"self-loop at {u!r}")
                if not (length > 0 and math.isfinite(length)):
                    raise InvalidSpaceError(f"edge {u!r}-{v!r} needs a positive finite length")
                adj[i].append((j, length))
                adj[j].append((i, length))
                key = (min(i, j), max(i, j))
                best[key] = min(best.get(key, INF), length)
            self._adj = adj
            self._edge_len = best
        else:
            raise InvalidSpaceError(f"unknown geometry {kind!r}")

        if validate and kind == MATRIX:
            problems = validate_metric(self)
            if problems:
                raise InvalidSpaceError("not a metric: " + "; ".join(problems[:5]))

    # constructors -------------------------------------------------------

    @classmethod
    def from_coordinates(cls, points, coords, measure=None):
        n = len(points)
        return cls(points, np.ones(n) if measure is None else measure, EMBEDDING,
                   coords=coords)

    @classmethod
    def from_distance_matrix(cls, points, distances, measure=None, validate=True):
        n = len(points)
        return cls(points, np.ones(n) if measure is None else measure, MATRIX,
                   matrix=distances, validate=validate)

    @classmethod
    def from_edges(cls, points, edges, measure=None):
        n = len(points)
        return cls(points, np.ones(n) if measure is None else measure, GRAPH,
                   edges=list(edges))

    # accessors ------------------------------------------------------------

    @property
    def points(self) -> tuple[str, ...]:
        return self._ids

    @property
    def kind(self) -> str:
        return self._kind

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    @property
    def coords(self):
        return self._coords

    @property
    def edges(self):
        """Edge list ``(u, v, length)`` of a graph space (shortest parallel edge)."""
        if self._edge_len is None:
            return None
        return [(self._ids[i], self._ids[j], w) for (i, j), w in sorted(self._edge_len.items())]

    def __len__(self):
        return len(self._ids)

    def __contains__(self, p):
        return p in self._index

    def __repr__(self):
        return f"Space({self._kind}, n={len(self)})"

    def index(self, p) -> int:
        try:
            return self._index[p]
        except KeyError:
            raise UnknownPointError(f"unknown point {p!r}") from None

    def weight(self, p) -> float:
        return float(self._weights[self.index(p)])

    def null_points(self) -> frozenset:
        return frozenset(p for p, w in zip(self._ids, self._weights) if w == 0)

    def edge_length(self, i: int, j: int) -> float:
        """Length of the edge between point indices ``i`` and ``j`` (+inf if absent)."""
        return self._edge_len.get((min(i, j), max(i, j)), INF)

    def neighbors(self, i: int):
        return self._adj[i]

    # metric -----------------------------------------------------------------

    def distance(self, x, y) -> float:
        return self.distance_ix(self.index(x), self.index(y))

    def distance_ix(self, i: int, j: int) -> float:
        if i == j:
            return 0.0
        if self._kind == EMBEDDING:
            return float(np.linalg.norm(self._coords[i] - self._coords[j]))
        if self._kind == MATRIX:
            return float(self._matrix[i, j])
        return float(self._sssp(i)[j])

    def distance_matrix(self) -> np.ndarray:
        n = len(self)
        if self._kind == EMBEDDING:
            diff = self._coords[:, None, :] - self._coords[None, :, :]
            return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        if self._kind == MATRIX:
            return np.array(self._matrix)
        return np.array([self._sssp(i) for i in range(n)])

    def _sssp(self, source: int) -> np.ndarray:
        with self._lock:
            hit = self._cache.get(source)
        if hit is not None:
            return hit
        dist = dijkstra(self._adj, source, len(self))
        with self._lock:
            self._cache[source] = dist
        return dist

    def nearest_index(self, xy) -> int:
        """Index of the nearest point to a coordinate; ties go to the lowest index."""
        d2 = np.sum((self._coords - np.asarray(xy, dtype=float)) ** 2, axis=1)
        return int(np.argmin(d2))


def dijkstra(adj, source: int, n: int) -> np.ndarray:
    """Single-source shortest-path lengths; unreachable vertices get +inf.

    Path sums are accumulated exactly and rounded once, so each distance is
    the correctly rounded length of a shortest path -- the same value
    ``math.fsum`` gives for that path's edge lengths.
    """
    best = {source: Fraction(0)}
    done = set()
    heap = [(Fraction(0), source)]
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for v, w in adj[u]:
            nd = d + Fraction(w)
            if v not in best or nd < best[v]:
                best[v] = nd
                heapq.heappush(heap, (nd, v))
    dist = np.full(n, INF)
    for v, d in best.items():
        dist[v] = float(d)
    dist.setflags(write=False)
    return dist


def distance(space: Space, x, y) -> float:
    """d(x, y).  Disconnected graph pairs give +inf."""
    return space.distance(x, y)


def validate_metric(space: Space, rtol: float | None = None, samples: int = 200_000,
                    seed: int = 0) -> list[str]:
    """Return a list of metric-axiom violations (empty when the metric is valid).

    Triangle inequality is exact for graphs and matrices and relative to
    ``1e-12`` for embeddings unless ``rtol`` is given.  Spaces above
    ``EXHAUSTIVE_LIMIT`` points are checked on ``samples`` random triples.
    """
    D = space.distance_matrix()
    n = len(space)
    if rtol is None:
        rtol = 1e-12 if space.kind == EMBEDDING else 0.0
    out = []
    if np.any(np.isnan(D)) or np.any(D < 0):
        out.append("negative or NaN distance")
    if not np.array_equal(D, D.T):
        i, j = np.argwhere(D != D.T)[0]
        out.append(f"asymmetric at ({space.points[i]}, {space.points[j]})")
    if np.any(np.diag(D) != 0):
        out.append("nonzero diagonal")
    off = D + np.eye(n)
    if np.any(off[~np.eye(n, dtype=bool)] <= 0):
        out.append("zero distance between distinct points")
    with np.errstate(invalid="ignore"):
        if n <= EXHAUSTIVE_LIMIT:
            for k in range(n):
                via = D[:, k:k + 1] + D[k:k + 1, :]
                bad = D > via * (1 + rtol)
                if np.any(bad):
                    i, j = np.argwhere(bad)[0]
                    out.append(
                        f"triangle ({space.points[i]}, {space.points[j]}) via {space.points[k]}")
                    break
        else:
            rng = np.random.default_rng(seed)
            i, j, k = rng.integers(0, n, size=(3, samples))
            bad = D[i, j] > (D[i, k] + D[k, j]) * (1 + rtol)
            if np.any(bad):
                t = int(np.argmax(bad))
                out.append(f"triangle ({space.points[i[t]]}, {space.points[j[t]]}) "
                           f"via {space.points[k[t]]}")
    return out


@dataclass(frozen=True, eq=False)
class Density:
    """Finite nonnegative function on the points of a space."""

    space: Space
    values: np.ndarray

    def __post_init__(self):
        v = _readonly(self.values)
        if v.shape != (len(self.space),):
            raise ValueError(f"density needs {len(self.space)} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise ValueError("density values must be finite and >= 0")
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, space, c):
        return cls(space, np.full(len(space), float(c)))

    @classmethod
    def indicator(cls, space, point_ids: Iterable, scale=1.0):
        v = np.zeros(len(space))
        for p in point_ids:
            v[space.index(p)] = scale
        return cls(space, v)

    @classmethod
    def from_mapping(cls, space, values: Mapping, default=0.0):
        v = np.full(len(space), float(default))
        for p, x in values.items():
            v[space.index(p)] = x
        return cls(space, v)

    def __call__(self, p) -> float:
        return float(self.values[self.space.index(p)])

    def _check(self, other):
        if other.space is not self.space:
            raise ValueError("densities live on different spaces")

    def __add__(self, other):
        self._check(other)
        return Density(self.space, self.values + other.values)

    def __mul__(self, c):
        return Density(self.space, self.values * float(c))

    __rmul__ = __mul__


@dataclass(frozen=True)
class NullSetCertificate:
    """A set of points claimed to have total measure zero."""

    point_ids: frozenset
    space: Space | None = None

    def __init__(self, point_ids: Iterable = (), space: Space | None = None):
        object.__setattr__(self, "point_ids", frozenset(str(p) for p in point_ids))
        object.__setattr__(self, "space", space)

    def __len__(self):
        return len(self.point_ids)

    def __iter__(self):
        return iter(sorted(self.point_ids))

    def union(self, other: "NullSetCertificate") -> "NullSetCertificate":
        return NullSetCertificate(self.point_ids | other.point_ids, self.space or other.space)


def ess_sup(space: Space, rho: Density) -> float:
    """Essential supremum: the largest density value on a point of positive measure."""
    if rho.space is not space:
        raise ValueError("density belongs to another space")
    mask = space.weights > 0
    return float(rho.values[mask].max()) if mask.any() else 0.0


def validate_null_set(space: Space, cert: NullSetCertificate) -> bool:
    """True iff every point of the certificate has measure weight zero."""
    if cert.space is not None and cert.space is not space:
        raise ValueError("certificate belongs to another space")
    return all(space.weight(p) == 0 for p in cert.point_ids)


def canonical_null_set(space: Space) -> NullSetCertificate:
    """The largest null set: all weight-zero points."""
    return NullSetCertificate(space.null_points(), space)


def null_mask(space: Space, certs: Sequence[NullSetCertificate] = (),
              canonical: bool = True) -> np.ndarray:
    """Boolean mask of the points treated as null.

    Invalid certificates raise ``ValueError``.
    """
    mask = np.zeros(len(space), dtype=bool)
    for cert in certs:
        if not validate_null_set(space, cert):
            raise ValueError(f"certificate {sorted(cert.point_ids)} has positive measure")
        for p in cert.point_ids:
            mask[space.index(p)] = True
    if canonical:
        mask |= space.weights == 0
    return mask
