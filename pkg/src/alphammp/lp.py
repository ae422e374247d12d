"""Exact rational linear programming with certificates.

Two-phase simplex over Fractions with Bland's rule, so termination is
guaranteed and every answer is bit-exact.  Infeasible systems return a
Farkas certificate y with y^T A <= 0 componentwise and y^T b > 0, which
callers turn into separating functionals.

Problems here are tiny (Picard rank <= 9, at most a few hundred columns),
so each iteration re-solves against the basis instead of maintaining an
inverse.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .linalg import solve_exact

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    status: str
    x: Optional[tuple[Fraction, ...]] = None
    objective: Optional[Fraction] = None
    farkas: Optional[tuple[Fraction, ...]] = None


def solve_lp(a_rows: Sequence[Sequence], b: Sequence, cost: Sequence) -> LPResult:
    """minimize cost . x  subject to  A x = b, x >= 0."""
    m = len(a_rows)
    n = len(a_rows[0]) if m else 0
    assert len(b) == m and len(cost) == n
    a = [[Fraction(x) for x in row] for row in a_rows]
    rhs = [Fraction(x) for x in b]
    c = [Fraction(x) for x in cost]

    if m == 0:
        if any(cj < 0 for cj in c):
            return LPResult(UNBOUNDED)
        return LPResult(OPTIMAL, x=tuple(Fraction(0) for _ in range(n)),
                        objective=Fraction(0))

    flip = [1] * m
    for i in range(m):
        if rhs[i] < 0:
            flip[i] = -1
            rhs[i] = -rhs[i]
            a[i] = [-x for x in a[i]]

    # phase 1: artificial columns e_i with unit cost
    cols = [tuple(a[i][j] for i in range(m)) for j in range(n)]
    art_cols = [tuple(Fraction(1) if i == k else Fraction(0) for i in range(m))
                for k in range(m)]
    all_cols = cols + art_cols
    c1 = [Fraction(0)] * n + [Fraction(1)] * m
    basis = list(range(n, n + m))

    basis, val, y = _simplex(all_cols, rhs, c1, basis, allowed=range(n + m))
    if val > 0:
        farkas = tuple(flip[i] * y[i] for i in range(m))
        return LPResult(INFEASIBLE, farkas=farkas)

    # phase 2 must start from an artificial-free basis, otherwise a pivot
    # could push a zero-valued artificial positive and leave the true
    # feasible region; unreplaceable artificials mark redundant rows
    while True:
        basis, drop_row = _purge_artificials(all_cols, rhs, basis, n)
        if drop_row is None:
            break
        keep = [i for i in range(len(rhs)) if i != drop_row]
        all_cols = [tuple(col[i] for i in keep) for col in all_cols]
        rhs = [rhs[i] for i in keep]

    if not rhs:
        # every row was redundant: minimize over the bare orthant
        if any(cj < 0 for cj in c):
            return LPResult(UNBOUNDED)
        return LPResult(OPTIMAL, x=tuple(Fraction(0) for _ in range(n)),
                        objective=Fraction(0))

    # phase 2 over the original columns only
    c2 = c + [Fraction(0)] * (len(all_cols) - n)
    basis, val, y = _simplex(all_cols, rhs, c2, basis, allowed=range(n))
    if basis is None:
        return LPResult(UNBOUNDED)
    x = [Fraction(0)] * n
    xb = _basic_solution(all_cols, rhs, basis)
    for bi, v in zip(basis, xb):
        if bi < n:
            x[bi] = v
    return LPResult(OPTIMAL, x=tuple(x), objective=val)


def _basis_matrix(cols, basis):
    m = len(cols[0])
    return tuple(tuple(cols[j][i] for j in basis) for i in range(m))


def _basic_solution(cols, rhs, basis):
    bm = _basis_matrix(cols, basis)
    sol = solve_exact(bm, tuple((r,) for r in rhs))
    return [row[0] for row in sol]


def _simplex(cols, rhs, c, basis, allowed):
    """Bland-rule simplex from a feasible basis.

    Returns (basis, objective, dual y).  On unboundedness returns
    (None, None, None).
    """
    m = len(rhs)
    allowed = set(allowed)
    while True:
        bm = _basis_matrix(cols, basis)
        xb = _basic_solution(cols, rhs, basis)
        cb = tuple((c[j],) for j in basis)
        y = [row[0] for row in solve_exact(tuple(zip(*bm)), cb)]
        entering = None
        for j in sorted(allowed):
            if j in basis:
                continue
            r = c[j] - sum(yi * aij for yi, aij in zip(y, cols[j]))
            if r < 0:
                entering = j
                break
        if entering is None:
            obj = sum(c[j] * v for j, v in zip(basis, xb))
            return basis, obj, y
        d = [row[0] for row in
             solve_exact(bm, tuple((v,) for v in cols[entering]))]
        theta = None
        leave_pos = None
        for i in range(m):
            if d[i] > 0:
                t = xb[i] / d[i]
                if theta is None or t < theta or (t == theta and basis[i] < basis[leave_pos]):
                    theta = t
                    leave_pos = i
        if theta is None:
            return None, None, None
        basis = list(basis)
        basis[leave_pos] = entering


def _purge_artificials(cols, rhs, basis, n):
    """Pivot zero-valued artificial variables out of the basis.

    Returns (basis, None) once the basis is artificial-free, or
    (basis, row_index) when a row turned out redundant and must be deleted
    by the caller (after which purging continues on the smaller system).
    """
    basis = list(basis)
    while True:
        pos = next((i for i, bj in enumerate(basis) if bj >= n), None)
        if pos is None:
            return basis, None
        xb = _basic_solution(cols, rhs, basis)
        assert xb[pos] == 0, "artificial variable stuck at nonzero value"
        bm = _basis_matrix(cols, basis)
        replaced = False
        for j in range(n):
            if j in basis:
                continue
            d = [row[0] for row in solve_exact(bm, tuple((v,) for v in cols[j]))]
            if d[pos] != 0:
                basis[pos] = j
                replaced = True
                break
        if not replaced:
            # the row carrying this artificial's unit entry is redundant
            art = basis[pos]
            row_idx = next(i for i, v in enumerate(cols[art]) if v != 0)
            del basis[pos]
            return basis, row_idx


def feasible_nonneg_combination(cols: Sequence[Sequence], target: Sequence):
    """Find x >= 0 with sum_j x_j col_j = target, or a Farkas certificate.

    Returns ("feasible", x) or ("infeasible", y) with y . col_j <= 0 for
    all j and y . target > 0, all exact.
    """
    m = len(target)
    a_rows = [[col[i] for col in cols] for i in range(m)]
    if not cols:
        if all(Fraction(t) == 0 for t in target):
            return "feasible", tuple()
        # separating certificate: y = target works against an empty cone
        y = tuple(Fraction(t) for t in target)
        return "infeasible", y
    res = solve_lp(a_rows, target, [Fraction(0)] * len(cols))
    if res.status == OPTIMAL:
        return "feasible", res.x
    assert res.status == INFEASIBLE
    return "infeasible", res.farkas
