"""Exact rational feasibility LPs via phase-one simplex with Bland's rule.

Standard form: find x >= 0 with A x = b.  Always returns a certificate:
either a feasible point or a Farkas vector y with yᵀA <= 0 and yᵀb > 0,
both re-verifiable by direct substitution.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .linalg import Mat, Vec, ZERO, ONE, dot, frac

__all__ = ["LPResult", "solve_feasibility", "cone_membership", "convex_membership",
           "free_feasibility"]


class UnboundedError(Exception):
    pass


@dataclass
class LPResult:
    feasible: bool
    point: Vec | None = None       # x with A x = b, x >= 0
    farkas: Vec | None = None      # y with yᵀA <= 0 and yᵀb > 0


def solve_feasibility(A: Mat, b: Vec) -> LPResult:
    """Decide {x >= 0 : A x = b} with exact arithmetic.

    Phase-one simplex on artificial variables, Bland's anti-cycling rule.
    """
    m = len(A)
    if m == 0:
        return LPResult(True, point=[])
    n = len(A[0])

    # orient rows so the right-hand side is nonnegative
    signs = [ONE if bb >= 0 else -ONE for bb in b]
    T = [[signs[i] * x for x in A[i]] + [signs[i] * b[i]] for i in range(m)]

    # tableau columns: n structural + m artificial + rhs
    for i in range(m):
        art = [ONE if j == i else ZERO for j in range(m)]
        T[i] = T[i][:n] + art + [T[i][n]]

    basis = [n + i for i in range(m)]
    ncols = n + m

    # phase-one objective: minimize sum of artificials.
    # reduced cost row: c_j - sum of rows for basic artificials.
    cost = [ZERO] * (ncols + 1)
    for j in range(ncols):
        cost[j] = (ONE if j >= n else ZERO) - sum(T[i][j] for i in range(m))
    cost[ncols] = -sum(T[i][ncols] for i in range(m))

    while True:
        enter = None
        for j in range(ncols):          # Bland: first improving column
            if cost[j] < 0:
                enter = j
                break
        if enter is None:
            break
        leave = None
        best = None
        for i in range(m):
            if T[i][enter] > 0:
                ratio = T[i][ncols] / T[i][enter]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave is None:
            raise UnboundedError("phase-one objective unbounded; inconsistent tableau")
        piv = T[leave][enter]
        T[leave] = [x / piv for x in T[leave]]
        for i in range(m):
            if i != leave and T[i][enter] != 0:
                f = T[i][enter]
                T[i] = [x - f * y for x, y in zip(T[i], T[leave])]
        if cost[enter] != 0:
            f = cost[enter]
            cost = [x - f * y for x, y in zip(cost, T[leave])]
        basis[leave] = enter

    objective = -cost[ncols]
    if objective > 0:
        # infeasible: extract Farkas vector from artificial reduced costs.
        # y_i = (1 - cbar_{artificial i}) * sign_i
        y = [(ONE - cost[n + i]) * signs[i] for i in range(m)]
        # verify, defensively
        for j in range(n):
            col = sum(y[i] * A[i][j] for i in range(m))
            assert col <= 0, "farkas certificate failed column check"
        assert dot(y, b) > 0, "farkas certificate failed rhs check"
        return LPResult(False, farkas=y)

    x = [ZERO] * n
    for i, bi in enumerate(basis):
        if bi < n:
            x[bi] = T[i][ncols]
    # verify, defensively
    for i in range(m):
        assert dot(A[i], x) == b[i], "feasible point failed row check"
    assert all(xx >= 0 for xx in x)
    return LPResult(True, point=x)


def cone_membership(v: Vec, generators: list[Vec]) -> LPResult:
    """Is v a nonnegative combination of the generators?

    Feasible: `point` holds the coefficients.  Infeasible: `farkas` is a
    separating functional f (= the Farkas vector) with f·g >= 0 for every
    generator and f·v < 0 after negation; we return it already negated.
    """
    if not generators:
        dim = len(v)
        if all(x == 0 for x in v):
            return LPResult(True, point=[])
        return LPResult(False, farkas=[-x for x in v] if dim else None)
    A = [[g[i] for g in generators] for i in range(len(v))]
    res = solve_feasibility(A, list(v))
    if res.feasible:
        return res
    f = [-y for y in res.farkas]        # f·g >= 0 for all g, f·v < 0
    return LPResult(False, farkas=f)


def convex_membership(v: Vec, points: list[Vec]) -> LPResult:
    """Is v a convex combination of the points?"""
    if not points:
        return LPResult(False, farkas=None)
    A = [[p[i] for p in points] for i in range(len(v))]
    A.append([ONE] * len(points))
    b = list(v) + [ONE]
    return solve_feasibility(A, b)


def free_feasibility(ineqs: list[tuple[Vec, Fraction]],
                     eqs: list[tuple[Vec, Fraction]], n: int) -> LPResult:
    """Find x in R^n (unrestricted sign) with a.x >= c and e.x = d.

    Encodes x = u - w with slack columns for the inequalities and reuses the
    phase-one simplex.  The returned point is x itself.
    """
    m = len(ineqs) + len(eqs)
    width = 2 * n + len(ineqs)
    A = [[ZERO] * width for _ in range(m)]
    b = []
    for r, (a, c) in enumerate(ineqs):
        for j in range(n):
            A[r][j] = frac(a[j])
            A[r][n + j] = -frac(a[j])
        A[r][2 * n + r] = -ONE
        b.append(frac(c))
    for r, (a, c) in enumerate(eqs):
        row = len(ineqs) + r
        for j in range(n):
            A[row][j] = frac(a[j])
            A[row][n + j] = -frac(a[j])
        b.append(frac(c))
    res = solve_feasibility(A, b)
    if not res.feasible:
        return LPResult(False, farkas=res.farkas)
    x = [res.point[j] - res.point[n + j] for j in range(n)]
    for (a, c) in ineqs:
        assert sum(ai * xi for ai, xi in zip(a, x)) >= c
    for (a, c) in eqs:
        assert sum(ai * xi for ai, xi in zip(a, x)) == c
    return LPResult(True, point=x)
