"""Builders for the standard test instances: Cantor staircase approximants,
two-route spaces with a null strip, random weighted graphs, and a few
parametric paths."""

from __future__ import annotations

import itertools

import numpy as np

from .curves import Curve, polyline
from .space import NullSetCertificate, Space


def cantor_nodes(k: int) -> np.ndarray:
    """Vertices of the graph of the level-``k`` Cantor function approximant.

    The approximant rises by ``2**-k`` linearly across each of the ``2**k``
    surviving intervals of length ``3**-k`` and is flat elsewhere.
    """
    if k < 0:
        raise ValueError("level must be >= 0")
    j = np.arange(2 ** k, dtype=np.int64)
    left3 = np.zeros(2 ** k, dtype=np.int64)  # left endpoints times 3**k
    for bit in range(k):
        left3 += ((j >> (k - 1 - bit)) & 1) * 2 * 3 ** (k - 1 - bit)
    scale = float(3 ** k)
    x = np.empty(2 ** (k + 1))
    y = np.empty(2 ** (k + 1))
    x[0::2] = left3 / scale
    x[1::2] = (left3 + 1) / scale
    y[0::2] = j / 2.0 ** k
    y[1::2] = (j + 1) / 2.0 ** k
    # consecutive equal x would only occur at k = 0 boundaries; none for k >= 0
    return np.column_stack([x, y])


def cantor_staircase(k: int) -> Curve:
    """``t -> (t, C_k(t))`` on ``[0, 1]``, parametrized by ``t``."""
    nodes = cantor_nodes(k)
    return Curve(nodes[:, 0], nodes)


def dyadic_level_region(k: int, atol: float = 1e-9):
    """Indicator of the horizontal lines ``y = j / 2**k``, the level-``k``
    stand-in for ``[0,1] x D`` with ``D`` the dyadic rationals."""
    def region(p):
        y = np.asarray(p)[:, 1] * 2.0 ** k
        return np.abs(y - np.round(y)) <= atol
    return region


def complement(region):
    return lambda p: ~np.asarray(region(p), dtype=bool)


def circle_path(radius=1.0):
    def path(t):
        t = np.asarray(t, dtype=float)
        return np.column_stack([radius * np.cos(t), radius * np.sin(t)])
    return path


def sampled_circle(samples: int, radius=1.0) -> Curve:
    t = np.linspace(0.0, 2 * np.pi, samples + 1)
    return Curve(t, circle_path(radius)(t))


def takagi_path(terms: int = 48, exponent: float = 0.5):
    """``t -> (t, sum_k 2**(-exponent k) tri(2**k t))``; non-rectifiable for
    ``exponent < 1`` once enough terms are kept."""
    def path(t):
        t = np.asarray(t, dtype=float)
        y = np.zeros_like(t)
        for k in range(terms):
            u = (2.0 ** k) * t
            y += 2.0 ** (-exponent * k) * np.abs(u - np.round(u))
        return np.column_stack([t, y])
    return path


def two_route_space(length=1.0, height=1.0, strip_points=3, detour_spacing=None,
                    strip_weight=0.0):
    """Points ``x=(0,0)`` and ``y=(length,0)`` joined by a straight route through
    a strip of weight-zero points and by a rectangular detour of height
    ``height``.

    Returns ``(space, curves, certificate)`` where ``curves`` holds every
    simple polyline in the route graph (so sub-routes between any two points
    are present) and ``certificate`` lists the strip points.
    """
    spacing = min(height, length) / 2 if detour_spacing is None else detour_spacing
    pts, weight, edges = [], [], []

    def add(name, xy, w):
        pts.append((name, np.asarray(xy, dtype=float)))
        weight.append(w)

    add("x", (0.0, 0.0), 1.0)
    add("y", (length, 0.0), 1.0)
    prev = "x"
    for i in range(strip_points):
        name = f"s{i}"
        add(name, (length * (i + 1) / (strip_points + 1), 0.0), strip_weight)
        edges.append((prev, name))
        prev = name
    edges.append((prev, "y"))
    corners = [(0.0, height), (length, height)]
    route = [np.array([0.0, 0.0])]
    for a, b in zip([(0.0, 0.0)] + corners, corners + [(length, 0.0)]):
        a, b = np.asarray(a), np.asarray(b)
        steps = max(1, int(np.ceil(np.linalg.norm(b - a) / spacing)))
        for s in range(1, steps + 1):
            route.append(a + (b - a) * s / steps)
    prev = "x"
    for i, xy in enumerate(route[1:-1]):
        name = f"d{i}"
        add(name, xy, 1.0)
        edges.append((prev, name))
        prev = name
    edges.append((prev, "y"))

    names = [n for n, _ in pts]
    coords = np.array([c for _, c in pts])
    space = Space.from_coordinates(names, coords, weight)
    adj = {n: set() for n in names}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    curves = []
    for s, t in itertools.permutations(names, 2):
        if s > t:
            continue
        for walk in _simple_walks(adj, s, t):
            curves.append(polyline([coords[names.index(p)] for p in walk], space))
    cert = NullSetCertificate([n for n, w in zip(names, weight) if w == 0], space)
    return space, curves, cert


def _simple_walks(adj, s, t):
    out, stack = [], [s]

    def walk(u):
        if u == t:
            out.append(list(stack))
            return
        for v in sorted(adj[u]):
            if v not in stack:
                stack.append(v)
                walk(v)
                stack.pop()

    walk(s)
    return out


def random_graph(rng, n: int, p: float = 0.5, weighted=True, null_prob=0.0,
                 connected=True) -> Space:
    """Random graph on ``n`` vertices; edge lengths uniform in [0.5, 2] when
    ``weighted`` else 1.  Each vertex gets weight 0 with ``null_prob``."""
    names = [f"v{i}" for i in range(n)]
    edges = []
    if connected:
        order = rng.permutation(n)
        for i in range(1, n):
            j = order[rng.integers(0, i)]
            edges.append((order[i], j))
    present = {(min(u, v), max(u, v)) for u, v in edges}
    for u in range(n):
        for v in range(u + 1, n):
            if (u, v) not in present and rng.random() < p:
                present.add((u, v))
    elist = [(names[u], names[v], float(rng.uniform(0.5, 2.0)) if weighted else 1.0)
             for u, v in sorted(present)]
    w = np.where(rng.random(n) < null_prob, 0.0, rng.uniform(0.5, 2.0, n))
    if not np.any(w > 0):
        w[0] = 1.0
    return Space.from_edges(names, elist, w)


def path_graph(names=("a", "b", "c"), length=1.0, measure=None) -> Space:
    edges = [(u, v, length) for u, v in zip(names, names[1:])]
    return Space.from_edges(list(names), edges, measure)
