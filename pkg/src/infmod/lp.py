"""Small dense linear programs: a two-phase tableau simplex.

Solves ``min c.x`` subject to ``A_ub x <= b_ub``, ``A_ge x >= b_ge`` and
``x >= 0``.  Meant for the few-hundred-variable programs that arise when
computing moduli of small curve families.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfmodError


class LPError(InfmodError):
    pass


class Infeasible(LPError):
    pass


class Unbounded(LPError):
    pass


@dataclass
class LPResult:
    x: np.ndarray
    value: float
    iterations: int


def _pivot(T, r, c):
    T[r] /= T[r, c]
    col = T[:, c].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])


def _run(T, basis, ncols, tol, max_iter, bland_after):
    """Minimize the objective stored in the last row of T over columns < ncols."""
    m = T.shape[0] - 1
    it = 0
    while True:
        red = T[-1, :ncols]
        if it < bland_after:
            c = int(np.argmin(red))
            if red[c] >= -tol:
                return it
        else:
            neg = np.nonzero(red < -tol)[0]
            if len(neg) == 0:
                return it
            c = int(neg[0])
        col = T[:m, c]
        pos = col > tol
        if not np.any(pos):
            raise Unbounded("objective is unbounded below")
        ratios = np.full(m, np.inf)
        ratios[pos] = T[:m, -1][pos] / col[pos]
        best = ratios.min()
        ties = np.nonzero(ratios <= best + tol * max(1.0, abs(best)))[0]
        r = int(min(ties, key=lambda i: basis[i]))
        _pivot(T, r, c)
        basis[r] = c
        it += 1
        if it > max_iter:
            raise LPError("simplex iteration limit reached")


def solve(c, A_ub=None, b_ub=None, A_ge=None, b_ge=None, tol=1e-9, max_iter=50_000):
    """Minimize ``c.x`` over ``x >= 0`` with inequality constraints."""
    c = np.asarray(c, dtype=float)
    n = len(c)
    rows, rhs, sense = [], [], []
    for A, b, s in ((A_ub, b_ub, 1), (A_ge, b_ge, -1)):
        if A is None:
            continue
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.asarray(b, dtype=float).reshape(-1)
        for a_row, b_i in zip(A, b):
            if b_i < 0:
                a_row, b_i, s_i = -a_row, -b_i, -s
            else:
                s_i = s
            rows.append(a_row)
            rhs.append(b_i)
            sense.append(s_i)
    m = len(rows)
    if m == 0:
        if np.any(c < 0):
            raise Unbounded("objective is unbounded below")
        return LPResult(np.zeros(n), 0.0, 0)

    n_art = sum(1 for s in sense if s < 0)
    ncols = n + m + n_art
    T = np.zeros((m + 1, ncols + 1))
    basis = [0] * m
    art = n + m
    for i, (a_row, b_i, s) in enumerate(zip(rows, rhs, sense)):
        T[i, :n] = a_row
        T[i, -1] = b_i
        if s > 0:
            T[i, n + i] = 1.0
            basis[i] = n + i
        else:
            T[i, n + i] = -1.0
            T[i, art] = 1.0
            basis[i] = art
            art += 1

    iters = 0
    if n_art:
        # phase 1: minimize the sum of artificials
        T[-1, :] = 0.0
        for i in range(m):
            if basis[i] >= n + m:
                T[-1, :] -= T[i, :]
        T[-1, n + m:ncols] += 1.0
        iters += _run(T, basis, ncols, tol, max_iter, bland_after=5 * (m + ncols))
        if -T[-1, -1] > tol * max(1.0, np.abs(rhs).max()):
            raise Infeasible("constraints are infeasible")
        for i in range(m):
            if basis[i] >= n + m:
                cand = np.nonzero(np.abs(T[i, :n + m]) > tol)[0]
                if len(cand):
                    _pivot(T, i, int(cand[0]))
                    basis[i] = int(cand[0])
        T = np.delete(T, np.s_[n + m:ncols], axis=1)
        ncols = n + m

    T[-1, :] = 0.0
    T[-1, :n] = c
    for i in range(m):
        if basis[i] < ncols:
            T[-1, :] -= T[-1, basis[i]] * T[i, :]
    iters += _run(T, basis, ncols, tol, max_iter, bland_after=5 * (m + ncols))

    x = np.zeros(ncols)
    for i, j in enumerate(basis):
        if j < ncols:
            x[j] = T[i, -1]
    x = x[:n]
    return LPResult(x, float(c @ x), iters)
