"""Exact linear algebra over the rational-function field.

Entries are RationalExpr (or Fraction); zero tests are exact, so ranks
and solutions are authoritative at generic points of the coefficient
field.
"""
from __future__ import annotations

from fractions import Fraction

from .errors import SingularFrame
from .symcore import RationalExpr, ZERO


def _is_zero(x):
    if isinstance(x, RationalExpr):
        return x.is_zero()
    return x == 0


def _weight(x):
    if isinstance(x, RationalExpr):
        return x.complexity()
    return 1


def rref(rows, ncols, col_order=None):
    """Reduced row echelon form by exact elimination.

    ``rows``: list of lists (mutated copies are used).  ``col_order``:
    sequence of column indices in pivot-preference order.  Returns
    (reduced rows, pivots) where pivots is a list of (row, col); rows
    that become zero are kept (all-zero) at the end.
    """
    rows = [list(r) for r in rows]
    if col_order is None:
        col_order = range(ncols)
    pivots = []
    used = set()
    for col in col_order:
        best = None
        for r in range(len(rows)):
            if r in used or _is_zero(rows[r][col]):
                continue
            if best is None or _weight(rows[r][col]) < _weight(rows[best][col]):
                best = r
        if best is None:
            continue
        used.add(best)
        pivots.append((best, col))
        pv = rows[best][col]
        rows[best] = [x / pv for x in rows[best]]
        for r in range(len(rows)):
            if r == best or _is_zero(rows[r][col]):
                continue
            f = rows[r][col]
            rows[r] = [a - f * b for a, b in zip(rows[r], rows[best])]
    return rows, pivots


def rank(rows, ncols=None):
    if not rows:
        return 0
    if ncols is None:
        ncols = len(rows[0])
    _, pivots = rref(rows, ncols)
    return len(pivots)


def mat_mul(a, b):
    return [
        [
            sum((a[i][k] * b[k][j] for k in range(len(b))), start=ZERO)
            for j in range(len(b[0]))
        ]
        for i in range(len(a))
    ]


def mat_vec(a, v):
    return [sum((a[i][k] * v[k] for k in range(len(v))), start=ZERO) for i in range(len(a))]


def mat_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def transpose(a):
    return [list(r) for r in zip(*a)]


def identity(n):
    from .symcore import ONE

    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def det(a):
    n = len(a)
    if n == 1:
        return a[0][0]
    if n == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    if n == 3:
        return (
            a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
        )
    # fraction-free expansion for larger sizes (not used in hot paths)
    total = ZERO
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in a[1:]]
        term = a[0][j] * det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def inverse(a):
    n = len(a)
    d = det(a)
    if _is_zero(d):
        raise SingularFrame("matrix not invertible over the function field")
    if n == 1:
        return [[1 / d if isinstance(d, Fraction) else RationalExpr.const(1) / d]]
    cof = []
    for i in range(n):
        row = []
        for j in range(n):
            minor = [
                [a[r][c] for c in range(n) if c != j] for r in range(n) if r != i
            ]
            m = minor[0][0] if n == 2 else det(minor)
            row.append(m if (i + j) % 2 == 0 else -m)
        cof.append(row)
    adj = transpose(cof)
    return [[x / d for x in row] for row in adj]


def solve_rational_qsystem(rows, rhs):
    """Solve A c = b for constants c in Q, where the entries of A and b
    are Fractions.  Returns the solution list or None when inconsistent;
    raises ValueError when the solution is not unique."""
    n = len(rows)
    m = len(rows[0]) if rows else 0
    aug = [list(r) + [rhs[i]] for i, r in enumerate(rows)]
    red, pivots = rref(aug, m)
    sol = [Fraction(0)] * m
    for r, c in pivots:
        sol[c] = red[r][m]
    pivot_cols = {c for _, c in pivots}
    if len(pivot_cols) < m:
        free = [c for c in range(m) if c not in pivot_cols]
        raise ValueError(f"underdetermined system; free columns {free}")
    for r in range(n):
        if all(_is_zero(x) for x in red[r][:m]) and not _is_zero(red[r][m]):
            return None
    return sol
