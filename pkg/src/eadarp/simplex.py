"""Small dense LP solver: min c.x  s.t.  A x <= b,  x >= 0.

Two-phase primal simplex with Bland's rule, sized for the tiny scheduling
LPs used by the fragment and oracle modules (tens of variables).  Not a
general-purpose solver.
"""

from __future__ import annotations

TOL = 1e-9

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


class LPResult:
    __slots__ = ("status", "x", "objective")

    def __init__(self, status, x=None, objective=None):
        self.status = status
        self.x = x
        self.objective = objective


def solve_lp(c, A, b):
    """Minimize ``c . x`` subject to ``A x <= b`` and ``x >= 0``.

    Rows with negative right-hand side receive artificial variables and a
    phase-1 pass establishes feasibility.
    """
    m = len(A)
    n = len(c)

    # tableau columns: n structural | m slack | artificials | rhs
    rows = []
    basis = []
    art_cols = []
    for i in range(m):
        row = [float(v) for v in A[i]] + [0.0] * m
        row.append(float(b[i]))
        row[n + i] = 1.0
        if row[-1] < 0.0:
            row = [-v for v in row]
        rows.append(row)
    # decide basis: slack if it entered with +1, else an artificial
    for i in range(m):
        if rows[i][n + i] > 0.0:
            basis.append(n + i)
        else:
            art_cols.append(i)
            basis.append(None)  # patched below

    ncols = n + m
    for k, i in enumerate(art_cols):
        for r in range(m):
            rows[r].insert(ncols + k, 1.0 if r == i else 0.0)
        basis[i] = ncols + k
    total = ncols + len(art_cols)

    if art_cols:
        # phase 1: minimize the sum of artificials
        obj = [0.0] * (total + 1)
        for j in range(ncols, total):
            obj[j] = 1.0
        for i in art_cols:
            for j in range(total + 1):
                obj[j] -= rows[i][j]
        status = _iterate(rows, obj, basis, total)
        if status == UNBOUNDED or -obj[-1] > 1e-7:
            return LPResult(INFEASIBLE)
        # drive leftover artificials out of the basis
        for i in range(m):
            if basis[i] >= ncols:
                piv = next((j for j in range(ncols)
                            if abs(rows[i][j]) > TOL), None)
                if piv is not None:
                    _pivot(rows, None, basis, i, piv)
        # drop artificial columns
        for r in rows:
            del r[ncols:total]
        total = ncols

    obj = [0.0] * (total + 1)
    for j in range(n):
        obj[j] = float(c[j])
    for i in range(m):
        bj = basis[i]
        if bj < total and abs(obj[bj]) > 0.0:
            coef = obj[bj]
            for j in range(total + 1):
                obj[j] -= coef * rows[i][j]

    status = _iterate(rows, obj, basis, total)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED)

    x = [0.0] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = rows[i][-1]
    value = sum(c[j] * x[j] for j in range(n))
    return LPResult(OPTIMAL, x, value)


def _iterate(rows, obj, basis, total):
    m = len(rows)
    for _ in range(20000):
        enter = next((j for j in range(total) if obj[j] < -TOL), None)
        if enter is None:
            return OPTIMAL
        leave = None
        best = None
        for i in range(m):
            a = rows[i][enter]
            if a > TOL:
                ratio = rows[i][-1] / a
                if best is None or ratio < best - TOL or (
                        abs(ratio - best) <= TOL and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave is None:
            return UNBOUNDED
        _pivot(rows, obj, basis, leave, enter)
    raise RuntimeError("simplex iteration limit exceeded")


def _pivot(rows, obj, basis, leave, enter):
    piv = rows[leave]
    factor = piv[enter]
    for j in range(len(piv)):
        piv[j] /= factor
    for i, row in enumerate(rows):
        if i != leave and abs(row[enter]) > 0.0:
            coef = row[enter]
            for j in range(len(row)):
                row[j] -= coef * piv[j]
    if obj is not None and abs(obj[enter]) > 0.0:
        coef = obj[enter]
        for j in range(len(obj)):
            obj[j] -= coef * piv[j]
    basis[leave] = enter
