"""Two-phase simplex with Bland's rule.

Solves min/max of a linear objective over named variables with
<=/=/>= constraints and per-variable bounds (lower >= 0 by default).
Built for correctness at small problem sizes, not speed.
"""

from __future__ import annotations

from typing import Mapping, Optional, Sequence, Tuple

import numpy as np

from .model import LinearConstraint

PIVOT_TOL = 1e-9

STATUS_OPTIMAL = "optimal"
STATUS_INFEASIBLE = "infeasible"
STATUS_UNBOUNDED = "unbounded"


def _pivot(tableau: np.ndarray, row: int, col: int) -> None:
    tableau[row] /= tableau[row, col]
    for r in range(tableau.shape[0]):
        if r != row and abs(tableau[r, col]) > 0.0:
            tableau[r] -= tableau[r, col] * tableau[row]


def _bland_enter(cost_row: np.ndarray, ncols: int) -> int:
    for j in range(ncols):
        if cost_row[j] < -PIVOT_TOL:
            return j
    return -1


def _leave(tableau: np.ndarray, col: int, nrows: int) -> int:
    best = -1
    best_ratio = None
    for i in range(nrows):
        a = tableau[i, col]
        if a > PIVOT_TOL:
            ratio = tableau[i, -1] / a
            if best_ratio is None or ratio < best_ratio - PIVOT_TOL:
                best, best_ratio = i, ratio
    return best


def _run_simplex(tableau: np.ndarray, basis: list, nrows: int, ncols: int) -> str:
    while True:
        col = _bland_enter(tableau[-1], ncols)
        if col < 0:
            return STATUS_OPTIMAL
        row = _leave(tableau, col, nrows)
        if row < 0:
            return STATUS_UNBOUNDED
        _pivot(tableau, row, col)
        basis[row] = col


def simplex_solve(c: np.ndarray, a: np.ndarray, relations: Sequence[str],
                  b: np.ndarray, maximize: bool = False):
    """Optimize c.x subject to a x (rel) b, x >= 0. Returns (x, value, status)."""
    c = np.asarray(c, dtype=float)
    a = np.array(a, dtype=float, copy=True)
    b = np.array(b, dtype=float, copy=True)
    relations = list(relations)
    m, n = a.shape if a.size else (0, len(c))
    if m == 0:
        # no constraints: optimum at origin unless objective improves unbounded
        improving = (c > 0) if maximize else (c < 0)
        if improving.any():
            return np.zeros(n), 0.0, STATUS_UNBOUNDED
        return np.zeros(n), 0.0, STATUS_OPTIMAL

    for i in range(m):
        if b[i] < 0:
            a[i] *= -1.0
            b[i] *= -1.0
            relations[i] = {"<=": ">=", ">=": "<=", "=": "="}[relations[i]]

    n_slack = sum(1 for r in relations if r == "<=")
    n_surplus = sum(1 for r in relations if r == ">=")
    n_art = sum(1 for r in relations if r in ("=", ">="))
    total = n + n_slack + n_surplus + n_art

    tableau = np.zeros((m + 1, total + 1))
    tableau[:m, :n] = a
    tableau[:m, -1] = b
    basis = [-1] * m
    s_col = n
    t_col = n + n_slack
    art_col = n + n_slack + n_surplus
    art_cols = []
    for i, rel in enumerate(relations):
        if rel == "<=":
            tableau[i, s_col] = 1.0
            basis[i] = s_col
            s_col += 1
        elif rel == ">=":
            tableau[i, t_col] = -1.0
            t_col += 1
            tableau[i, art_col] = 1.0
            basis[i] = art_col
            art_cols.append(art_col)
            art_col += 1
        else:
            tableau[i, art_col] = 1.0
            basis[i] = art_col
            art_cols.append(art_col)
            art_col += 1

    # phase 1: minimize sum of artificials
    if art_cols:
        for j in art_cols:
            tableau[-1, j] = 1.0
        for i in range(m):
            if basis[i] in art_cols:
                tableau[-1] -= tableau[i]
        status = _run_simplex(tableau, basis, m, total)
        if status != STATUS_OPTIMAL or tableau[-1, -1] < -1e-7:
            return np.zeros(n), 0.0, STATUS_INFEASIBLE
        # drive remaining artificials out of the basis if possible
        for i in range(m):
            if basis[i] in art_cols:
                for j in range(n + n_slack + n_surplus):
                    if abs(tableau[i, j]) > PIVOT_TOL:
                        _pivot(tableau, i, j)
                        basis[i] = j
                        break
        for j in art_cols:
            tableau[:, j] = 0.0
        tableau[-1, :] = 0.0

    # phase 2
    obj = -c if maximize else c
    tableau[-1, :n] = obj
    for i in range(m):
        if basis[i] < n and abs(tableau[-1, basis[i]]) > 0.0:
            tableau[-1] -= tableau[-1, basis[i]] * tableau[i]
    status = _run_simplex(tableau, basis, m, total)
    if status == STATUS_UNBOUNDED:
        return np.zeros(n), 0.0, STATUS_UNBOUNDED

    x = np.zeros(total)
    for i in range(m):
        x[basis[i]] = tableau[i, -1]
    value = float(c @ x[:n])
    return x[:n].copy(), value, STATUS_OPTIMAL


def solve_lp(objective: Mapping, constraints: Sequence[LinearConstraint],
             bounds: Optional[Mapping] = None, maximize: bool = True,
             variables: Optional[Sequence[str]] = None):
    """Solve over named variables. ``bounds`` maps var -> (lower, upper).

    Default bounds are (0, None). Returns (values: dict, objective_value, status).
    Constraints must carry numeric ``rhs`` (instantiate symbolic ones first).
    """
    if variables is None:
        names = list(objective.keys())
        for con in constraints:
            for v in con.coefficients:
                if v not in names:
                    names.append(v)
        if bounds:
            for v in bounds:
                if v not in names:
                    names.append(v)
    else:
        names = list(variables)
    idx = {v: j for j, v in enumerate(names)}
    n = len(names)
    bounds = dict(bounds or {})
    lower = np.zeros(n)
    upper = [None] * n
    for v, (lo, up) in bounds.items():
        lower[idx[v]] = 0.0 if lo is None else float(lo)
        upper[idx[v]] = up

    c = np.zeros(n)
    for v, coef in objective.items():
        c[idx[v]] = coef

    rows, rels, rhs = [], [], []
    for con in constraints:
        if con.rhs is None:
            raise ValueError("constraint rhs not instantiated")
        row = np.zeros(n)
        for v, coef in con.coefficients.items():
            row[idx[v]] = coef
        rows.append(row)
        rels.append(con.relation)
        rhs.append(float(con.rhs))
    for j, up in enumerate(upper):
        if up is not None:
            row = np.zeros(n)
            row[j] = 1.0
            rows.append(row)
            rels.append("<=")
            rhs.append(float(up))

    # shift x = lower + x' so all decision variables are >= 0
    a = np.array(rows) if rows else np.zeros((0, n))
    b = np.array(rhs) - (a @ lower if rows else 0.0)
    shift_value = float(c @ lower)

    x_shift, value, status = simplex_solve(c, a, rels, b, maximize=maximize)
    if status != STATUS_OPTIMAL:
        return {v: 0.0 for v in names}, 0.0, status
    x = x_shift + lower
    return {v: float(x[j]) for v, j in idx.items()}, value + shift_value, status
