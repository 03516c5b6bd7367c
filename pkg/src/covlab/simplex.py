"""Dense two-phase simplex for the small LPs arising in body oracles.

Problems here have at most a few dozen variables (vertex weights of a
polytope) and a handful of equality constraints (the ambient dimension),
so a plain dense tableau with Bland's rule is both fast enough and
deterministic.
"""

from __future__ import annotations

import numpy as np

_PIVOT_EPS = 1e-11


class LPError(RuntimeError):
    pass


class Infeasible(LPError):
    pass


class Unbounded(LPError):
    pass


def _pivot(T, basis, row, col):
    T[row] /= T[row, col]
    for r in range(T.shape[0]):
        if r != row and abs(T[r, col]) > 0.0:
            T[r] -= T[r, col] * T[row]
    basis[row] = col


def _simplex_core(T, basis, ncols):
    """Run Bland-rule simplex on tableau T (last row = objective)."""
    m = T.shape[0] - 1
    while True:
        obj = T[-1, :ncols]
        enter = -1
        for j in range(ncols):
            if obj[j] < -_PIVOT_EPS:
                enter = j
                break
        if enter < 0:
            return
        leave, best = -1, np.inf
        for i in range(m):
            a = T[i, enter]
            if a > _PIVOT_EPS:
                ratio = T[i, -1] / a
                if ratio < best - _PIVOT_EPS or (
                    abs(ratio - best) <= _PIVOT_EPS
                    and (leave < 0 or basis[i] < basis[leave])
                ):
                    best, leave = ratio, i
        if leave < 0:
            raise Unbounded("objective unbounded below")
        _pivot(T, basis, leave, enter)


def solve_lp(c, A, b):
    """Minimize c @ x subject to A @ x = b, x >= 0.

    Returns (x, objective). Raises Infeasible / Unbounded.
    """
    c = np.asarray(c, dtype=float)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).copy()
    m, n = A.shape

    # Make b nonnegative so the artificial basis is feasible.
    neg = b < 0
    A = A.copy()
    A[neg] *= -1.0
    b[neg] *= -1.0

    # Phase 1: minimize the sum of artificial variables.
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n : n + m] = np.eye(m)
    T[:m, -1] = b
    T[-1, n : n + m] = 1.0
    basis = list(range(n, n + m))
    # Price out the artificial basis.
    T[-1] -= T[:m].sum(axis=0)
    _simplex_core(T, basis, n + m)
    if T[-1, -1] < -1e-8:
        raise Infeasible("phase 1 optimum positive")

    # Drive any artificial variables out of the basis.
    for i in range(m):
        if basis[i] >= n:
            for j in range(n):
                if abs(T[i, j]) > _PIVOT_EPS:
                    _pivot(T, basis, i, j)
                    break

    # Phase 2 on the original objective, artificial columns frozen.
    T[-1, :] = 0.0
    T[-1, :n] = c
    for i in range(m):
        if basis[i] < n:
            T[-1] -= T[-1, basis[i]] * T[i]
    T[:, n : n + m] = 0.0
    _simplex_core(T, basis, n)

    x = np.zeros(n)
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = T[i, -1]
    return x, float(c @ x)


def feasible(A, b):
    """Phase-1 feasibility of A @ x = b, x >= 0."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    try:
        solve_lp(np.zeros(A.shape[1]), A, b)
        return True
    except Infeasible:
        return False
