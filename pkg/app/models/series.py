"""
Truncated power series in t with Laurent-polynomial coefficients
"""

import logging
from typing import Iterator, List, Sequence, Union

from .laurent import Coefficient, LaurentPoly, LaurentRatio, ring_zero

logger = logging.getLogger(__name__)


def _is_unit(c: Coefficient) -> bool:
    if isinstance(c, LaurentRatio):
        return not c.is_zero()
    return c.is_monomial() and abs(c.terms[0][1]) == 1


def _inverse(c: Coefficient) -> Coefficient:
    if isinstance(c, LaurentRatio):
        return LaurentRatio.one() / c
    return c.monomial_inverse()


class TSeries:
    """
    Series c_0 + c_1 t + ... + c_N t^N

    Coefficients are LaurentPoly or LaurentRatio; every coefficient up to the
    order is stored, zeros included.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[Union[Coefficient, int]], order: int = None):
        coeffs = [c if isinstance(c, (LaurentPoly, LaurentRatio)) else LaurentPoly.coerce(c) for c in coeffs]
        if order is None:
            order = len(coeffs) - 1
        if order < 0:
            raise ValueError(f"Series order must be >= 0, got {order}")
        sample = coeffs[0] if coeffs else LaurentPoly.zero()
        coeffs = coeffs[: order + 1]
        coeffs += [ring_zero(sample) for _ in range(order + 1 - len(coeffs))]
        self.coeffs = tuple(coeffs)

    @classmethod
    def zero(cls, order: int) -> "TSeries":
        return cls([], order)

    @classmethod
    def one(cls, order: int) -> "TSeries":
        return cls([LaurentPoly.one()], order)

    @classmethod
    def constant(cls, c: Coefficient, order: int) -> "TSeries":
        return cls([c], order)

    @classmethod
    def monomial(cls, c: Coefficient, degree: int, order: int) -> "TSeries":
        if degree > order:
            return cls.zero(order)
        return cls([ring_zero(c)] * degree + [c], order)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int) -> Coefficient:
        return self.coeffs[n]

    def __iter__(self) -> Iterator[Coefficient]:
        return iter(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def is_zero(self) -> bool:
        return all(not c for c in self.coeffs)

    def truncate(self, order: int) -> "TSeries":
        return TSeries(self.coeffs, min(order, self.order))

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other) -> "TSeries":
        if not isinstance(other, TSeries):
            return NotImplemented
        order = min(self.order, other.order)
        return TSeries([self.coeffs[n] + other.coeffs[n] for n in range(order + 1)], order)

    def __neg__(self) -> "TSeries":
        return TSeries([-c for c in self.coeffs])

    def __sub__(self, other) -> "TSeries":
        if not isinstance(other, TSeries):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other) -> "TSeries":
        if isinstance(other, (LaurentPoly, LaurentRatio, int)):
            return self.scale(other)
        if not isinstance(other, TSeries):
            return NotImplemented
        order = min(self.order, other.order)
        out = []
        for n in range(order + 1):
            acc = ring_zero(self.coeffs[0])
            for k in range(n + 1):
                a, b = self.coeffs[k], other.coeffs[n - k]
                if a and b:
                    acc = acc + a * b
            out.append(acc)
        return TSeries(out, order)

    def __rmul__(self, other) -> "TSeries":
        if isinstance(other, (LaurentPoly, LaurentRatio, int)):
            return self.scale(other)
        return NotImplemented

    def scale(self, c: Union[Coefficient, int]) -> "TSeries":
        return TSeries([x * c for x in self.coeffs])

    def shift(self, k: int = 1) -> "TSeries":
        """Multiply by t^k, keeping the order"""
        zero = ring_zero(self.coeffs[0])
        return TSeries([zero] * k + list(self.coeffs), self.order)

    def inverse(self) -> "TSeries":
        c0 = self.coeffs[0]
        if not _is_unit(c0):
            raise ValueError(f"Constant term {c0} is not invertible")
        inv0 = _inverse(c0)
        out: List[Coefficient] = [inv0]
        for n in range(1, self.order + 1):
            acc = ring_zero(inv0)
            for k in range(1, n + 1):
                if self.coeffs[k]:
                    acc = acc + self.coeffs[k] * out[n - k]
            value = -(acc * inv0)
            out.append(value.reduced() if isinstance(value, LaurentRatio) else value)
        return TSeries(out, self.order)

    def __truediv__(self, other) -> "TSeries":
        if isinstance(other, TSeries):
            return self * other.inverse()
        if isinstance(other, LaurentRatio):
            return TSeries([LaurentRatio.coerce(c) / other for c in self.coeffs])
        return TSeries([c.exact_div(other) if isinstance(c, LaurentPoly) else c / other for c in self.coeffs])

    # -- comparison -------------------------------------------------------

    def agrees_with(self, other: "TSeries", order: int = None) -> bool:
        """Coefficient-wise equality up to order (default: the common order)"""
        limit = min(self.order, other.order)
        if order is not None:
            limit = min(limit, order)
        return all(self.coeffs[n] == other.coeffs[n] for n in range(limit + 1))

    def __eq__(self, other) -> bool:
        if not isinstance(other, TSeries):
            return NotImplemented
        return self.order == other.order and self.agrees_with(other)

    __hash__ = None

    def to_laurent(self) -> "TSeries":
        """Every coefficient as a LaurentPoly (NotDivisible if one is not)"""
        return TSeries([c.to_laurent() if isinstance(c, LaurentRatio) else c for c in self.coeffs])

    def __repr__(self) -> str:
        terms = ", ".join(str(c) for c in self.coeffs)
        return f"TSeries([{terms}], order={self.order})"


def series_det(matrix: Sequence[Sequence[TSeries]]) -> TSeries:
    """
    Determinant of a matrix of series

    Gaussian elimination over the power-series ring; every pivot must have
    an invertible constant term (true for I - T when the t^0 part of T is
    nilpotent).
    """
    n = len(matrix)
    order = min(s.order for row in matrix for s in row) if n else 0
    m = [[s.truncate(order) for s in row] for row in matrix]
    det = TSeries.one(order)
    sign = 1
    for k in range(n):
        pivot = next((i for i in range(k, n) if _is_unit(m[i][k][0])), None)
        if pivot is None:
            raise ValueError(f"No pivot with invertible constant term in column {k}")
        if pivot != k:
            m[k], m[pivot] = m[pivot], m[k]
            sign = -sign
        det = det * m[k][k]
        inv = m[k][k].inverse()
        for i in range(k + 1, n):
            if m[i][k].is_zero():
                continue
            factor = m[i][k] * inv
            for j in range(k + 1, n):
                m[i][j] = m[i][j] - factor * m[k][j]
    return det if sign > 0 else -det


def series_sum(items: Sequence[TSeries], order: int) -> TSeries:
    total = TSeries.zero(order)
    for s in items:
        total = total + s
    return total
