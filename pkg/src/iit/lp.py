"""Exact dense-tableau simplex for small covering LPs.

Solves  min c.x  s.t.  A x >= 1,  x >= 0  with c >= 0 by running the primal
simplex on the dual  max 1.y  s.t.  A^T y <= c,  y >= 0, whose origin is
feasible. Arithmetic is in ``Fraction`` and pivoting follows Bland's rule,
so results are deterministic and exact.
"""
from __future__ import annotations

from fractions import Fraction


class InfeasibleError(ValueError):
    pass


def solve_covering_lp(A, costs):
    """Return (x, objective) for min costs.x subject to A x >= 1, x >= 0.

    ``A`` is a list of rows (one per element, 0/1 entries per column).
    """
    m = len(A)
    k = len(costs)
    c = [Fraction(v) for v in costs]
    if any(v < 0 for v in c):
        raise ValueError("covering costs must be nonnegative (the LP is unbounded otherwise)")
    for r, row in enumerate(A):
        if len(row) != k:
            raise ValueError("constraint row length does not match number of columns")
        if not any(row):
            raise InfeasibleError(f"row {r} has no covering column")
    if m == 0:
        return [Fraction(0)] * k, Fraction(0)

    # Dual tableau: variables y_0..y_{m-1}, slacks s_0..s_{k-1}; one row per column of A.
    width = m + k
    rows = []
    for j in range(k):
        row = [Fraction(A[r][j]) for r in range(m)] + [Fraction(int(t == j)) for t in range(k)]
        rows.append((row, c[j]))
    tab = [r for r, _ in rows]
    rhs = [b for _, b in rows]
    basis = [m + j for j in range(k)]
    # reduced objective row for max 1.y: z_j - c_j = -1 for y, 0 for slacks
    obj = [Fraction(-1)] * m + [Fraction(0)] * k
    z = Fraction(0)

    while True:
        enter = next((j for j in range(width) if obj[j] < 0), None)
        if enter is None:
            break
        best = None
        for i in range(k):
            a = tab[i][enter]
            if a > 0:
                ratio = rhs[i] / a
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            raise ValueError("dual unbounded; primal covering LP infeasible")
        i = best[1]
        piv = tab[i][enter]
        tab[i] = [v / piv for v in tab[i]]
        rhs[i] /= piv
        for r in range(k):
            if r != i and tab[r][enter] != 0:
                factor = tab[r][enter]
                tab[r] = [a - factor * b for a, b in zip(tab[r], tab[i])]
                rhs[r] -= factor * rhs[i]
        factor = obj[enter]
        obj = [a - factor * b for a, b in zip(obj, tab[i])]
        z -= factor * rhs[i]
        basis[i] = enter

    # primal x_j is the reduced cost of dual slack j
    x = [obj[m + j] for j in range(k)]
    return x, z
