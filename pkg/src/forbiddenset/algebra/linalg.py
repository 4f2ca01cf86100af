"""Exact Gaussian elimination over the scalar types."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .scalars import simplify


def row_reduce(rows: list[list]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form and the pivot columns."""
    m = [[simplify(x) for x in r] for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = 1 / m[r][col]
        m[r] = [simplify(x * inv) for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [simplify(a - f * b) for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def solve_linear(rows: Sequence[Sequence], rhs: Sequence) -> tuple[list | None, list[list]]:
    """Solve ``A x = b`` exactly.

    Returns ``(particular, nullspace_basis)``; ``particular`` is ``None`` when the
    system is inconsistent.
    """
    n = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = row_reduce(aug)
    if n in pivots:
        return None, []
    x = [Fraction(0)] * n
    for r, col in enumerate(pivots):
        x[col] = red[r][n]
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for r, col in enumerate(pivots):
            v[col] = simplify(-red[r][f])
        basis.append(v)
    return x, basis
