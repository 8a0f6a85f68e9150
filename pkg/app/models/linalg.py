"""
Exact dense matrices over Laurent polynomials (lists of rows)
"""

import logging
from typing import List, Sequence

from .laurent import Coefficient, LaurentPoly, LaurentRatio

logger = logging.getLogger(__name__)

Matrix = List[List[Coefficient]]


def _exact_quotient(a: Coefficient, b: Coefficient) -> Coefficient:
    if isinstance(a, LaurentRatio) or isinstance(b, LaurentRatio):
        return LaurentRatio.coerce(a) / b
    return a.exact_div(b)


def zeros(rows: int, cols: int = None) -> Matrix:
    cols = rows if cols is None else cols
    return [[LaurentPoly.zero() for _ in range(cols)] for _ in range(rows)]


def identity(n: int) -> Matrix:
    m = zeros(n)
    for i in range(n):
        m[i][i] = LaurentPoly.one()
    return m


def matmul(a: Sequence[Sequence[Coefficient]], b: Sequence[Sequence[Coefficient]]) -> Matrix:
    inner = len(b)
    cols = len(b[0]) if inner else 0
    out = []
    for row in a:
        out_row = []
        for j in range(cols):
            acc = LaurentPoly.zero()
            for k in range(inner):
                if row[k] and b[k][j]:
                    acc = acc + row[k] * b[k][j]
            out_row.append(acc)
        out.append(out_row)
    return out


def matadd(a: Matrix, b: Matrix) -> Matrix:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def matsub(a: Matrix, b: Matrix) -> Matrix:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def unitriangular_inverse(lower: Matrix) -> Matrix:
    """
    Inverse of a lower unitriangular matrix by forward substitution

    Only ring operations are needed since every pivot is 1.
    """
    n = len(lower)
    for i in range(n):
        if lower[i][i] != 1 or any(lower[i][j] for j in range(i + 1, n)):
            raise ValueError("Matrix is not lower unitriangular")
    inv = zeros(n)
    for j in range(n):
        for i in range(j, n):
            acc = LaurentPoly.one() if i == j else LaurentPoly.zero()
            for k in range(j, i):
                if lower[i][k]:
                    acc = acc - lower[i][k] * inv[k][j]
            inv[i][j] = acc
    return inv


def bareiss_det(matrix: Sequence[Sequence[Coefficient]]) -> Coefficient:
    """
    Fraction-free determinant (Bareiss elimination)

    Every intermediate division is exact by Sylvester's identity, so over
    LaurentPoly entries no rational function ever appears.

    Args:
        matrix: square matrix of LaurentPoly (or LaurentRatio) entries

    Returns:
        The determinant, in the entries' ring
    """
    n = len(matrix)
    if n == 0:
        return LaurentPoly.one()
    m = [list(row) for row in matrix]
    sign = 1
    prev = LaurentPoly.one()
    for k in range(n - 1):
        if not m[k][k]:
            pivot = next((i for i in range(k + 1, n) if m[i][k]), None)
            if pivot is None:
                return LaurentPoly.zero()
            m[k], m[pivot] = m[pivot], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = _exact_quotient(m[i][j] * m[k][k] - m[i][k] * m[k][j], prev)
        prev = m[k][k]
    return m[n - 1][n - 1] * sign
