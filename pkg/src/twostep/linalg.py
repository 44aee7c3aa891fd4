"""Dense exact linear algebra over Q and Q(i).

Matrices are plain lists of row lists holding Fractions (or
GaussianRationals).  Every routine copies its input.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

Matrix = List[list]


def _row(r) -> list:
    return [Fraction(x) if isinstance(x, int) else x for x in r]


def zeros(rows: int, cols: int) -> Matrix:
    return [[Fraction(0)] * cols for _ in range(rows)]


def identity(n: int) -> Matrix:
    m = zeros(n, n)
    for i in range(n):
        m[i][i] = Fraction(1)
    return m


def transpose(m: Sequence[Sequence]) -> Matrix:
    if not m:
        return []
    return [list(col) for col in zip(*m)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def matvec(a: Sequence[Sequence], v: Sequence) -> list:
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a]


def rref(m: Sequence[Sequence], ncols: Optional[int] = None) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form and pivot columns.

    Rows that become zero are dropped, so ``len(result) == rank``.
    """
    rows = [_row(r) for r in m if any(r)]
    if not rows:
        return [], []
    width = len(rows[0]) if ncols is None else ncols
    pivots: List[int] = []
    r = 0
    for c in range(width):
        if r == len(rows):
            break
        p = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        if piv != 1:
            inv = 1 / piv
            rows[r] = [x * inv for x in rows[r]]
        prow = rows[r]
        for i in range(len(rows)):
            if i != r:
                f = rows[i][c]
                if f:
                    rows[i] = [x - f * y if y else x for x, y in zip(rows[i], prow)]
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def rank(m: Sequence[Sequence]) -> int:
    """Rank by forward elimination only."""
    rows = [_row(r) for r in m if any(r)]
    if not rows:
        return 0
    width = len(rows[0])
    r = 0
    for c in range(width):
        if r == len(rows):
            break
        p = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        prow = rows[r]
        piv = prow[c]
        for i in range(r + 1, len(rows)):
            f = rows[i][c]
            if f:
                q = f / piv
                rows[i] = [x - q * y if y else x for x, y in zip(rows[i], prow)]
        r += 1
    return r


def nullspace(m: Sequence[Sequence], ncols: int) -> Matrix:
    """Basis (as row vectors) of ``{x : m x = 0}``."""
    red, pivots = rref(m, ncols) if m else ([], [])
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def solve(m: Sequence[Sequence], rhs: Sequence) -> Optional[list]:
    """One solution of ``m x = rhs`` (free variables set to zero), or None."""
    ncols = len(m[0]) if m else 0
    aug = [list(row) + [b] for row, b in zip(m, rhs)]
    red, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, p in zip(red, pivots):
        x[p] = row[ncols]
    return x


def inverse(m: Sequence[Sequence]) -> Matrix:
    n = len(m)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    red, pivots = rref(aug, 2 * n)
    if pivots[:n] != list(range(n)) or len(red) < n:
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in red]


def det(m: Sequence[Sequence]):
    rows = [_row(r) for r in m]
    n = len(rows)
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if rows[i][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            rows[c], rows[p] = rows[p], rows[c]
            d = -d
        piv = rows[c][c]
        d = d * piv
        for i in range(c + 1, n):
            f = rows[i][c]
            if f:
                q = f / piv
                rows[i] = [x - q * y for x, y in zip(rows[i], rows[c])]
    return d


def row_space_basis(vectors: Sequence[Sequence], dim: int) -> Matrix:
    """Canonical basis (reduced echelon rows) of the span of ``vectors``."""
    red, _ = rref([list(v) for v in vectors], dim) if vectors else ([], [])
    return red
