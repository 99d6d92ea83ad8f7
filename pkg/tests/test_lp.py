import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from infmod.lp import Infeasible, Unbounded, solve


def test_textbook_problem():
    # max 3x + 5y  s.t. x <= 4, 2y <= 12, 3x + 2y <= 18
    res = solve([-3, -5], [[1, 0], [0, 2], [3, 2]], [4, 12, 18])
    assert res.value == pytest.approx(-36)
    np.testing.assert_allclose(res.x, [2, 6], atol=1e-9)


def test_ge_constraints():
    res = solve([1, 1], A_ge=[[1, 2], [3, 1]], b_ge=[4, 6])
    assert res.value == pytest.approx(2.8)


def test_infeasible():
    with pytest.raises(Infeasible):
        solve([1.0], [[1.0]], [1.0], [[1.0]], [2.0])


def test_unbounded():
    with pytest.raises(Unbounded):
        solve([-1.0, 0.0], A_ge=[[1.0, -1.0]], b_ge=[0.0])


@settings(max_examples=60)
@given(st.integers(0, 2 ** 32 - 1))
def test_random_minimax_programs_match_scipy(seed):
    rng = np.random.default_rng(seed)
    m, n = int(rng.integers(1, 8)), int(rng.integers(1, 8))
    C = rng.uniform(0, 3, (m, n)) * (rng.random((m, n)) < 0.7)
    C[np.arange(m), rng.integers(0, n, m)] += rng.uniform(0.1, 1, m)
    c = np.zeros(n + 1)
    c[-1] = 1
    A_ub = np.hstack([np.eye(n), -np.ones((n, 1))])
    A_ge = np.hstack([C, np.zeros((m, 1))])
    ours = solve(c, A_ub, np.zeros(n), A_ge, np.ones(m))
    ref = linprog(c, A_ub=np.vstack([A_ub, -A_ge]), b_ub=np.concatenate([np.zeros(n), -np.ones(m)]),
                  method="highs")
    assert ours.value == pytest.approx(ref.fun, rel=1e-8, abs=1e-10)
    assert np.all(A_ge @ ours.x >= 1 - 1e-9)
