import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from infmod.errors import ConsistencyError
from infmod.essential import (check_metric_axioms, connecting_family, d_ess, d_hat, d_N,
                              essential_matrix, simple_paths)
from infmod.instances import random_graph
from infmod.space import NullSetCertificate, Space

from oracles import brute_force_paths, floyd_warshall

INF = math.inf


def test_connecting_family_path_graph(abc):
    fam = connecting_family(abc, "a", "c")
    assert [list(c.nodes) for c in fam.curves] == [["a", "b", "c"]]
    with pytest.raises(ValueError):
        connecting_family(abc, "a", "a")


def test_connecting_family_four_cycle(square):
    fam = connecting_family(square, "a", "c")
    assert sorted(map(tuple, (c.nodes for c in fam.curves))) == \
        sorted(seq for seq, _ in brute_force_paths(list(square.edges), "a", "c"))
    assert fam.lengths.tolist() == [2.0, 2.0]


def test_connecting_family_empty_when_disconnected():
    sp = Space.from_edges(list("abc"), [("a", "b", 1.0)])
    assert len(connecting_family(sp, "a", "c")) == 0
    r = d_hat(sp, "a", "c")
    assert r.d == r.d_ess == r.d_hat == INF


def test_supplied_curves_filtered_and_reversed(two_route):
    sp, curves, _ = two_route
    fam = connecting_family(sp, "y", "x", curves=curves)
    assert len(fam) > 0
    assert all(c.start == (1.0, 0.0) and c.end == (0.0, 0.0) for c in fam.curves)


def test_simple_paths_respect_max_hops(square):
    assert simple_paths(square, "a", "c", max_hops=1) == []
    assert len(simple_paths(square, "a", "b", max_hops=1)) == 1


def test_path_graph_d_ess(abc):
    assert d_ess(abc, "a", "c") == 2.0 == abc.distance("a", "c")
    assert d_ess(abc, "a", "a") == 0.0


def test_two_route_metrics(two_route):
    sp, curves, cert = two_route
    assert sp.distance("x", "y") == 1.0
    assert d_ess(sp, "x", "y", [cert], curves=curves) == pytest.approx(3.0)
    assert d_N(sp, "x", "y", cert, curves=curves) == pytest.approx(3.0)
    assert d_N(sp, "x", "y", NullSetCertificate(), curves=curves) == pytest.approx(1.0)
    r = d_hat(sp, "x", "y", [cert], curves=curves)
    assert r.d_hat == pytest.approx(3.0) and r.d_hat == r.d_ess
    assert r.witnessing_null_set == cert
    assert r.witnessing_curve is not None


def test_all_curves_exceptional_gives_infinite_distance():
    sp = Space.from_edges(list("amb"), [("a", "m", 1.0), ("m", "b", 1.0)], [1, 0, 1])
    cert = NullSetCertificate(["m"], sp)
    assert d_ess(sp, "a", "b", [cert]) == INF
    assert d_N(sp, "a", "b", cert) == INF
    assert d_hat(sp, "a", "b", [cert]).d_hat == INF


def test_positive_weights_give_shortest_path(rng):
    for _ in range(15):
        g = random_graph(rng, int(rng.integers(2, 7)))
        D = floyd_warshall(list(g.points), list(g.edges))
        res = essential_matrix(g)
        for (x, y), r in res.items():
            d = D[g.index(x), g.index(y)]
            assert r.d_ess == pytest.approx(d, rel=1e-12)
            assert r.d_ess == g.distance(x, y)
            assert r.d_hat == r.d_ess


def test_certificates_only_increase_distance(rng):
    for _ in range(10):
        g = random_graph(rng, 6, null_prob=0.4)
        x, y = g.points[0], g.points[-1]
        null = sorted(g.null_points())
        base = d_ess(g, x, y, canonical=False)
        one = d_ess(g, x, y, [NullSetCertificate(null[:1], g)], canonical=False)
        every = d_ess(g, x, y, [NullSetCertificate(null, g)], canonical=False)
        assert base <= one <= every


def test_disagreement_is_a_consistency_error(monkeypatch, abc):
    import infmod.essential as e
    monkeypatch.setattr(e, "ess_length", lambda *a, **k: 7.0)
    with pytest.raises(ConsistencyError):
        e.d_hat(abc, "a", "c")


def test_axioms_on_fixture_instances(abc, square, two_route):
    assert check_metric_axioms(abc).ok
    assert check_metric_axioms(square).ok
    sp, curves, cert = two_route
    rep = check_metric_axioms(sp, [cert], curves=curves)
    assert rep.ok, rep.violations[:3]
    assert rep.checks > len(sp) ** 3 // 2


def test_axioms_with_infinite_distances():
    sp = Space.from_edges(list("abcd"), [("a", "b", 1.0), ("c", "d", 1.0)])
    rep = check_metric_axioms(sp)
    assert rep.ok
    assert rep.results["a", "c"].d_ess == INF


@settings(max_examples=25)
@given(st.integers(0, 2 ** 32 - 1))
def test_random_graph_metric_axioms(seed):
    g = random_graph(np.random.default_rng(seed), 5, null_prob=0.3, connected=seed % 2 == 0)
    rep = check_metric_axioms(g)
    assert rep.ok, rep.violations[:3]
    for (x, y), r in rep.results.items():
        assert r.d_ess == rep.results[y, x].d_ess
        assert r.d_ess >= r.d
