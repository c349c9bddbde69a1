"""Exact rational matrices.

Matrices are tuples of rows of :class:`fractions.Fraction`.  Determinants use
Bareiss' fraction-free elimination on an integer-scaled copy, so no rational
intermediate ever grows beyond the final result.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence

from .errors import ArgumentError, DimensionError

RationalMatrix = tuple[tuple[Fraction, ...], ...]
RationalVector = tuple[Fraction, ...]


def to_vector(values) -> RationalVector:
    return tuple(Fraction(v) for v in values)


def to_matrix(rows) -> RationalMatrix:
    m = tuple(to_vector(row) for row in rows)
    if not m or not m[0]:
        raise DimensionError("matrix must have positive dimensions")
    if any(len(row) != len(m[0]) for row in m):
        raise DimensionError("ragged matrix")
    return m


def shape(m: Sequence[Sequence]) -> tuple[int, int]:
    return len(m), len(m[0]) if m else 0


def identity(n: int) -> RationalMatrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def columns(m: Sequence[Sequence], cols: Sequence[int]) -> RationalMatrix:
    """Submatrix formed by the given 0-based columns, in the given order."""
    return tuple(tuple(row[c] for c in cols) for row in m)


def hstack(*blocks) -> RationalMatrix:
    rows = len(blocks[0])
    if any(len(b) != rows for b in blocks):
        raise DimensionError("blocks have different row counts")
    return tuple(tuple(x for b in blocks for x in b[i]) for i in range(rows))


def negate(m) -> RationalMatrix:
    return tuple(tuple(-x for x in row) for row in m)


def column_vector(v) -> RationalMatrix:
    return tuple((Fraction(x),) for x in v)


def _bareiss(a: list[list[int]]) -> int:
    n = len(a)
    s = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    s = -s
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return s * a[n - 1][n - 1]


def determinant(a) -> Fraction:
    """Exact determinant of a square rational matrix."""
    n = len(a)
    if n == 0 or any(len(row) != n for row in a):
        raise ArgumentError("determinant needs a non-empty square matrix")
    scale = 1
    ints = []
    for row in a:
        row = [Fraction(x) for x in row]
        d = lcm(*(x.denominator for x in row))
        scale *= d
        ints.append([x.numerator * (d // x.denominator) for x in row])
    return Fraction(_bareiss(ints), scale)


def det_sign(a) -> int:
    d = determinant(a)
    return (d > 0) - (d < 0)


def solve(a, b) -> RationalVector:
    """Solve ``a x = b`` exactly; ``a`` must be nonsingular."""
    n = len(a)
    if len(b) != n or any(len(row) != n for row in a):
        raise DimensionError("solve needs a square system")
    m = [[Fraction(x) for x in row] + [Fraction(bi)] for row, bi in zip(a, b)]
    for k in range(n):
        piv = next((i for i in range(k, n) if m[i][k] != 0), None)
        if piv is None:
            raise ArgumentError("singular matrix")
        m[k], m[piv] = m[piv], m[k]
        inv = 1 / m[k][k]
        m[k] = [x * inv for x in m[k]]
        for i in range(n):
            if i != k and m[i][k] != 0:
                f = m[i][k]
                m[i] = [x - f * y for x, y in zip(m[i], m[k])]
    return tuple(row[n] for row in m)


def matvec(a, x) -> RationalVector:
    return tuple(sum((aij * xj for aij, xj in zip(row, x)), Fraction(0)) for row in a)


def principal_submatrix(m, idx: Sequence[int]) -> RationalMatrix:
    return tuple(tuple(m[i][j] for j in idx) for i in idx)
