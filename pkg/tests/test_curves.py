import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from infmod.curves import (Curve, arc_length_parametrize, compute_length, concatenate, evaluate,
                           is_subcurve, length_inverse, line_integral, measure_in, occupation,
                           polyline, positive_length_in, positive_time_in, reverse, subcurve)
from infmod.errors import InvalidCurveError, NonRectifiableError
from infmod.instances import (cantor_nodes, cantor_staircase, circle_path, complement,
                              dyadic_level_region, sampled_circle, takagi_path)
from infmod.space import Density, Space

from oracles import cantor_function, half_edge_occupation, polygon_length, sampled_occupation


def staircase_closed_form(k):
    return math.sqrt(1 + (4 / 9) ** k) + 1 - (2 / 3) ** k


# construction -------------------------------------------------------------------

def test_rejects_constant_and_unsorted():
    with pytest.raises(InvalidCurveError):
        Curve([0, 1], [[1, 1], [1, 1]])
    with pytest.raises(InvalidCurveError):
        Curve([0, 0], [[0, 0], [1, 1]])
    with pytest.raises(InvalidCurveError):
        Curve([0], [[0, 0]])


def test_edge_walk_needs_edges(abc):
    with pytest.raises(InvalidCurveError):
        Curve.from_path(abc, ["a", "c"])


# length ---------------------------------------------------------------------------

def test_unit_segment_length():
    L, prof = compute_length(Curve([0, 1], [[0, 0], [1, 0]]), 1e-9)
    assert L == 1.0
    assert prof.cumulative[0] == 0 and prof.cumulative[-1] == 1.0


@pytest.mark.parametrize("k", range(1, 9))
def test_staircase_matches_fine_partition(k):
    t = np.linspace(0, 1, 4 * 3 ** k + 1)
    brute = polygon_length(np.column_stack([t, cantor_function(t, k)]))
    L, _ = compute_length(cantor_staircase(k))
    assert L == pytest.approx(brute, rel=1e-12)
    assert L == pytest.approx(staircase_closed_form(k), rel=1e-12)


def test_staircase_level_12_bounds_and_limit():
    L, _ = compute_length(cantor_staircase(12), 1e-6)
    assert math.sqrt(2) <= L <= 2
    lengths = [compute_length(cantor_staircase(k))[0] for k in range(4, 13)]
    assert np.all(np.diff(lengths) > 0)
    # Aitken extrapolation of the geometric approach to the limit
    a, b, c = lengths[-3:]
    assert c - (c - b) ** 2 / ((c - b) - (b - a)) == pytest.approx(2.0, abs=1e-4)


def test_cantor_nodes_lie_on_cantor_function():
    for k in range(0, 7):
        n = cantor_nodes(k)
        np.testing.assert_allclose(n[:, 1], cantor_function(n[:, 0], k), atol=1e-14)


def test_sampled_circle_perimeter():
    L, _ = compute_length(sampled_circle(2 ** 12))
    assert abs(L - 2 * math.pi) < 1e-5


def test_circle_path_refinement_converges_monotonically():
    c = Curve(np.linspace(0, 2 * math.pi, 5), path=circle_path())
    L, prof = compute_length(c, 1e-9)
    assert abs(L - 2 * math.pi) < 1e-5
    assert np.all(np.diff(prof.history) >= 0)


def test_takagi_curve_is_flagged_nonrectifiable():
    c = Curve([0.0, 1.0], path=takagi_path())
    with pytest.raises(NonRectifiableError) as err:
        compute_length(c, max_segments=2 ** 12)
    assert err.value.lower_bound > 1.0


def test_profile_respects_distance_bound():
    c = polyline([[0, 0], [1, 2], [3, 1], [0, 0], [-2, 2]])
    _, prof = compute_length(c)
    nodes = c.nodes
    for i in range(len(nodes) - 1):
        d = np.linalg.norm(nodes[i + 1] - nodes[i])
        assert d <= prof.cumulative[i + 1] - prof.cumulative[i] + 1e-9


# length function inverse ------------------------------------------------------------

def test_length_inverse_on_unit_speed_segment():
    _, prof = compute_length(Curve([0, 1], [[0, 0], [1, 0]]))
    assert length_inverse(prof, 0.5) == 0.5
    assert length_inverse(prof, 1.0) == 1.0


def test_length_inverse_takes_right_end_of_flat_stretch():
    c = Curve([0, 0.3, 0.6, 1.0], [[0, 0], [0.3, 0], [0.3, 0], [0.7, 0]])
    L, prof = compute_length(c)
    assert L == pytest.approx(0.7)
    assert length_inverse(prof, 0.3) == 0.6
    assert length_inverse(prof, L) == c.b
    with pytest.raises(ValueError):
        length_inverse(prof, L + 1e-6)
    with pytest.raises(ValueError):
        length_inverse(prof, -1e-9)


@given(st.lists(st.floats(0, 1), min_size=1, max_size=20))
def test_length_inverse_is_right_inverse(ts):
    c = Curve([0, 0.3, 0.6, 1.0, 1.5], [[0, 0], [0.3, 0], [0.3, 0], [0.7, 0.5], [0, 1]])
    L, prof = compute_length(c)
    for t in ts:
        assert prof(length_inverse(prof, t * L)) == pytest.approx(t * L, abs=1e-12)


# arc length ---------------------------------------------------------------------------

def test_speed_two_segment_reparametrized():
    g = arc_length_parametrize(Curve([0, 1], [[0, 0], [2, 0]]))
    np.testing.assert_array_equal(g.params, [0, 2])
    np.testing.assert_array_equal(g.nodes, [[0, 0], [2, 0]])


def test_pause_is_removed():
    c = Curve([0, 1, 2, 3], [[0, 0], [1, 0], [1, 0], [1, 1]])
    g = arc_length_parametrize(c)
    assert len(g) == 3
    assert compute_length(g)[0] == compute_length(c)[0] == 2.0


def test_staircase_reparametrization_is_unit_speed():
    g = arc_length_parametrize(cantor_staircase(8))
    speed = np.linalg.norm(np.diff(g.nodes, axis=0), axis=1) / np.diff(g.params)
    assert speed.max() <= 1 + 1e-9


def test_reparametrization_recovers_nodes():
    c = Curve([0, 0.5, 2, 2.5, 4], [[0, 0], [1, 1], [1, 1], [2, 0], [0, -1]])
    _, prof = compute_length(c)
    g = arc_length_parametrize(c)
    np.testing.assert_allclose(evaluate(g, prof(c.params)), c.nodes, atol=1e-9)


# line integrals and predicates --------------------------------------------------------

@pytest.fixture
def grid():
    xs = np.array([(i, j) for i in range(4) for j in range(3)], dtype=float)
    return Space.from_coordinates([f"g{i}" for i in range(len(xs))], xs)


def test_constant_density_integrates_to_scaled_length(grid):
    c = polyline([[0, 0], [3, 2], [1, 1]], grid)
    L, _ = compute_length(c)
    assert line_integral(c, Density.constant(grid, 0.7)) == pytest.approx(0.7 * L, rel=1e-12)


def test_indicator_of_set_containing_curve(abc):
    c = Curve.from_path(abc, ["a", "b", "c"])
    assert line_integral(c, Density.indicator(abc, abc.points)) == 2.0


def test_graph_occupation_matches_half_edge_rule(rng):
    names = [f"v{i}" for i in range(5)]
    edges = [(names[i], names[i + 1], float(rng.uniform(0.5, 2))) for i in range(4)]
    edges.append(("v0", "v3", 1.3))
    sp = Space.from_edges(names, edges)
    seq = ["v2", "v1", "v0", "v3", "v4"]
    occ = occupation(Curve.from_path(sp, seq)).length
    np.testing.assert_allclose(occ, half_edge_occupation(names, edges, seq), rtol=1e-12)


def test_embedded_occupation_matches_sampling(rng):
    for _ in range(10):
        pts = rng.uniform(0, 5, (6, 2))
        sp = Space.from_coordinates([f"q{i}" for i in range(6)], pts)
        path = rng.uniform(0, 5, (4, 2))
        exact = occupation(polyline(path, sp)).length
        approx = sampled_occupation(pts, path)
        assert exact.sum() == pytest.approx(polygon_length(path), rel=1e-12)
        # each cell boundary crossing costs at most one sample
        assert np.abs(exact - approx).max() <= 12 * polygon_length(path) / 4000


def test_staircase_vertical_region_integral():
    c = cantor_staircase(12)
    E = dyadic_level_region(12)
    assert abs(line_integral(c, lambda p: E(p).astype(float)) - 1) <= 2e-2


def test_staircase_length_but_no_time_in_complement():
    c = cantor_staircase(12)
    F = complement(dyadic_level_region(12))
    m_len, m_time = measure_in(c, F)
    # the steep pieces: 2^12 segments of width 3^-12 and height 2^-12
    assert m_len == pytest.approx(math.sqrt(1 + (4 / 9) ** 12), rel=1e-9)
    assert m_time == pytest.approx((2 / 3) ** 12, rel=1e-9)
    assert positive_length_in(c, F, 1e-2) and not positive_time_in(c, F, 1e-2)


def test_pause_has_time_but_no_length():
    p = np.array([1.0, 0.0])
    c = Curve([0, 1, 2, 3], [[0, 0], p, p, [1, 1]])
    at_p = lambda xs: np.all(np.isclose(xs, p, atol=1e-12), axis=1)
    assert positive_time_in(c, at_p)
    assert not positive_length_in(c, at_p)
    far = lambda xs: xs[:, 0] > 10
    assert not positive_time_in(c, far) and not positive_length_in(c, far)


def test_disjoint_point_set_gives_nothing(grid):
    c = polyline([[0, 0], [0, 2]], grid)
    assert not positive_length_in(c, ["g9", "g10", "g11"])
    assert not positive_time_in(c, ["g9", "g10", "g11"])


def test_predicates_agree_on_arc_length_curves(grid, rng):
    for _ in range(20):
        g = arc_length_parametrize(polyline(rng.uniform(0, 3, (4, 2)), grid))
        F = [p for p in grid.points if rng.random() < 0.3]
        assert positive_length_in(g, F) == positive_time_in(g, F)


# combinators --------------------------------------------------------------------------

def test_concatenate_reverse_subcurve(abc):
    ab = Curve.from_path(abc, ["a", "b"])
    bc = Curve.from_path(abc, ["b", "c"])
    abc_ = concatenate(ab, bc)
    assert list(abc_.nodes) == ["a", "b", "c"]
    assert compute_length(abc_)[0] == 2.0
    assert list(reverse(abc_).nodes) == ["c", "b", "a"]
    assert is_subcurve(subcurve(abc_, 1, 2), abc_)
    assert is_subcurve(reverse(ab), abc_)
    with pytest.raises(InvalidCurveError):
        concatenate(ab, ab)


def test_path_curves_must_be_reparametrized_before_combining():
    c = Curve([0.0, 1.0], path=circle_path())
    with pytest.raises(InvalidCurveError):
        reverse(c)


@given(st.lists(st.tuples(st.integers(-20, 20), st.integers(-20, 20)), min_size=2, max_size=8),
       st.lists(st.tuples(st.integers(-20, 20), st.integers(-20, 20)), min_size=1, max_size=8))
def test_concatenation_is_additive(a, b):
    a = np.array(a, float) / 3
    b = np.vstack([a[-1:], np.array(b, float) / 3])
    if np.all(a == a[0]) or np.all(b == b[0]):
        return
    alpha, beta = Curve(np.arange(len(a)), a), Curve(np.arange(len(b)), b)
    total = compute_length(concatenate(alpha, beta))[0]
    assert total == pytest.approx(compute_length(alpha)[0] + compute_length(beta)[0], abs=1e-9)
