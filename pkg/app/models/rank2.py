"""
Rank-2 affine cluster algebras: x_{n+1} x_{n-1} = 1 + x_n^b (n odd), 1 + x_n^c (n even)

Only the affine cases b*c = 4 are supported. The (4,1) system is obtained
from (1,4) through x_n(x_0, x_1) = x_{1-n}(x_1, x_0).
"""

import logging
from math import factorial
from typing import Dict, List, Sequence, Tuple

from app import config

from .errors import ConservationFailure, NotDivisible, PositivityViolation
from .graphs import TransferMatrix, resolvent_series
from .laurent import SYMBOLS, LaurentPoly, LaurentRatio, VarId, substitute_ratio, var
from .series import TSeries

logger = logging.getLogger(__name__)

AFFINE_CASES = ((2, 2), (1, 4), (4, 1))


def x_var(k: int) -> LaurentPoly:
    return var(config.RANK2_VAR_FORMAT.format(k=k))


class Rank2System:
    """x_n in the seed (x_k, x_{k+1}), memoized"""

    def __init__(self, b: int, c: int, k: int = 0):
        if (b, c) not in AFFINE_CASES:
            raise ValueError(f"(b, c) = ({b}, {c}) is not an affine rank-2 case")
        if (b, c) == (4, 1) and k != 0:
            raise ValueError("The (4,1) system is only supported with the seed (x0, x1)")
        self.b, self.c, self.k = b, c, k
        self.seed = (x_var(k), x_var(k + 1))
        self._memo: Dict[int, LaurentPoly] = {k: self.seed[0], k + 1: self.seed[1]}
        self._mirror = None
        if (b, c) == (4, 1):
            self._mirror = Rank2System(1, 4, 0)

    def variables(self) -> Tuple[VarId, VarId]:
        return tuple(SYMBOLS.lookup(config.RANK2_VAR_FORMAT.format(k=j)) for j in (self.k, self.k + 1))

    def exponent(self, n: int) -> int:
        return self.b if n % 2 else self.c

    def x(self, n: int) -> LaurentPoly:
        if n in self._memo:
            return self._memo[n]
        if self._mirror is not None:
            x0, x1 = self.variables()
            value = self._mirror.x(1 - n).substitute({x0: self.seed[1], x1: self.seed[0]})
        elif n < self.k and (self.b, self.c) == (2, 2) and self.k == 0:
            x0, x1 = self.variables()
            value = self.x(1 - n).substitute({x0: self.seed[1], x1: self.seed[0]})
        else:
            step = -1 if n > self.k + 1 else 1
            prev, prev2 = n + step, n + 2 * step
            try:
                value = (1 + self.x(prev) ** self.exponent(prev)).exact_div(self.x(prev2))
            except NotDivisible as e:
                raise NotDivisible(f"rank-2 ({self.b},{self.c}) step x_{n}: {e}") from e
        self._memo[n] = value
        logger.debug("x_%d for (%d,%d): %d terms", n, self.b, self.c, len(value))
        return value

    def __repr__(self) -> str:
        return f"Rank2System(b={self.b}, c={self.c}, k={self.k})"


def iterate(system: Rank2System, n: int) -> LaurentPoly:
    return system.x(n)


def conserved_22(system: Rank2System) -> LaurentPoly:
    """c = x1/x0 + 1/(x0 x1) + x0/x1 in the seed of system"""
    u, v = system.seed
    return (v * v + 1 + u * u).exact_div(u * v)


def conserved_14(case: int, system: Rank2System) -> LaurentPoly:
    """
    c^(0) = (x0^4 + (1+x1)^2) / (x0^2 x1)   seed (x0, x1)
    c^(1) = (x2^4 + (1+x1)^2) / (x2^2 x1)   seed (x1, x2)
    """
    if case == 0:
        if system.k != 0:
            raise ValueError("case 0 uses the seed (x0, x1)")
        even, odd = system.seed
    elif case == 1:
        if system.k != 1:
            raise ValueError("case 1 uses the seed (x1, x2)")
        odd, even = system.seed
    else:
        raise ValueError(f"case must be 0 or 1, got {case}")
    return (even ** 4 + (1 + odd) ** 2).exact_div(even ** 2 * odd)


def check_orbit(system: Rank2System, conserved: LaurentPoly, stride: int = 1, length: int = config.RANK2_ORBIT) -> bool:
    """
    Substitute (x_{k+j}, x_{k+j+1}) for the seed and compare with the
    original, for j = stride, 2*stride, ... up to length
    """
    a, b = system.variables()
    for j in range(stride, length + 1, stride):
        n = system.k + j
        moved = substitute_ratio(conserved, {a: system.x(n), b: system.x(n + 1)})
        if moved != LaurentRatio(conserved):
            raise ConservationFailure(f"Conserved quantity of {system} changes at n={n}")
    return True


def series_22(system: Rank2System, order: int) -> TSeries:
    """X(t) = (x0 - (c x0 - x1) t) / (1 - c t + t^2)"""
    x0, x1 = system.seed
    c = conserved_22(system)
    numerator = TSeries([x0, x1 - c * x0], order)
    denominator = TSeries([1, -c, 1], order)
    return numerator / denominator


def series_14(case: int, system: Rank2System, order: int) -> TSeries:
    """
    U(t) = (u_0 - t (c u_0 - u_1)) / (1 - c t + t^2)

    Case 0: u_n = x_{2n} in (x0, x1). Case 1: coefficient n is x_{2n+2}
    in (x1, x2).
    """
    c = conserved_14(case, system)
    if case == 0:
        u0, u1 = system.x(0), system.x(2)
    else:
        u0, u1 = system.x(2), system.x(4)
    numerator = TSeries([u0, u1 - c * u0], order)
    denominator = TSeries([1, -c, 1], order)
    return numerator / denominator


def weights_14(case: int, system: Rank2System) -> Tuple[LaurentPoly, LaurentPoly, LaurentPoly]:
    """Path weights (a1, a2, a3) on the two-vertex graph; a1 a3 = 1 + a2"""
    if case == 0:
        even, odd = system.seed
    else:
        odd, even = system.seed
    a = (1 + odd).exact_div(even ** 2)
    b = (even ** 4 + (1 + odd) ** 2).exact_div(even ** 4 * odd)
    d = (even ** 4 + 1 + odd).exact_div(even ** 2 * odd)
    return (a, b, d) if case == 0 else (d, b, a)


def yweights_22(system: Rank2System) -> Tuple[LaurentPoly, LaurentPoly, LaurentPoly]:
    """(x1/x0, 1/(x0 x1), x0/x1)"""
    x0, x1 = system.seed
    return (x1 * x0 ** -1, (x0 * x1) ** -1, x0 * x1 ** -1)


def transfer_matrix_14(weights: Sequence[LaurentPoly]) -> TransferMatrix:
    """T = t [[a1, a2], [1, a3]]"""
    a1, a2, a3 = weights
    tm = TransferMatrix(2)
    tm.add(0, 0, 1, a1)
    tm.add(0, 1, 1, a2)
    tm.add(1, 0, 1, LaurentPoly.one())
    tm.add(1, 1, 1, a3)
    return tm


def transfer_matrix_22(weights: Sequence[LaurentPoly]) -> TransferMatrix:
    """[[t y1, t y2], [1, t y3]]; the step away from vertex 0 carries no t"""
    y1, y2, y3 = weights
    tm = TransferMatrix(2)
    tm.add(0, 0, 1, y1)
    tm.add(0, 1, 1, y2)
    tm.add(1, 0, 0, LaurentPoly.one())
    tm.add(1, 1, 1, y3)
    return tm


def path_series_14(case: int, system: Rank2System, order: int) -> TSeries:
    prefactor = system.x(0) if case == 0 else system.x(2)
    return resolvent_series(transfer_matrix_14(weights_14(case, system)), 0, 0, order).scale(prefactor)


def path_series_22(system: Rank2System, order: int) -> TSeries:
    """X(t) = x0 + t x1 ((I - T)^{-1})_{0,0}"""
    x0, x1 = system.seed
    resolvent = resolvent_series(transfer_matrix_22(yweights_22(system)), 0, 0, order)
    return TSeries([x0], order) + resolvent.scale(x1).shift(1)


def multinomial(top: int, *parts: int) -> int:
    """
    top! / (m_1! ... m_k! (top - sum m_i)!), or 0 when sum m_i > top

    All-zero parts give 1 for any top, so the binomial (q+l-1 choose l) is 1
    at q = l = 0.
    """
    if any(p < 0 for p in parts):
        return 0
    if not any(parts):
        return 1
    rest = top - sum(parts)
    if top < 0 or rest < 0:
        return 0
    value = factorial(top) // factorial(rest)
    for p in parts:
        value //= factorial(p)
    return value


def closed_form_14(case: int, n: int) -> LaurentPoly:
    """
    x_{2n}(x0, x1) (case 0) or x_{2n+2}(x1, x2) (case 1) as an explicit sum

    Every index is bounded by n through the vanishing multinomials.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if case not in (0, 1):
        raise ValueError(f"case must be 0 or 1, got {case}")
    x1 = x_var(1)
    total: Dict[Tuple[int, int], int] = {}
    for q in range(n + 1):
        for l in range(n + 1):
            for r in range(q + 1):
                for s in range(n + 1):
                    if case == 0:
                        if s > l:
                            continue
                        weight = multinomial(n - q - l, q - r, r) * multinomial(q + l - 1, l - s, s)
                        if not weight:
                            continue
                        top = n + 2 * r + s - 2 * q - l
                        for m in range(max(top, 0) + 1):
                            coeff = weight * multinomial(top, m)
                            if coeff:
                                key = (1 + 4 * (q + l) - 2 * n - 4 * (r + s), m - q - l)
                                total[key] = total.get(key, 0) + coeff
                    else:
                        weight = multinomial(n - q - l, q - r, r, s) * multinomial(q + l - 1, l)
                        if not weight:
                            continue
                        top = 2 * r + s + l
                        for m in range(top + 1):
                            coeff = weight * multinomial(top, m)
                            if coeff:
                                key = (1 + 2 * n - 4 * (q + l + r + s), q + l + m - n)
                                total[key] = total.get(key, 0) + coeff
    even = x_var(0 if case == 0 else 2)
    result = LaurentPoly.zero()
    for (e_even, e_odd), coeff in total.items():
        result = result + even ** e_even * x1 ** e_odd * coeff
    return result


def closed_form_22(n: int) -> LaurentPoly:
    """Coefficient of t^n in sum C(p+q-1,q) C(q+l-1,l) t^{p+q+l} x0^{1+l-p-q} x1^{p-q-l}"""
    x0, x1 = x_var(0), x_var(1)
    result = LaurentPoly.zero()
    for p in range(n + 1):
        for q in range(n + 1 - p):
            l = n - p - q
            coeff = multinomial(p + q - 1, q) * multinomial(q + l - 1, l)
            if coeff:
                result = result + x0 ** (1 + l - p - q) * x1 ** (p - q - l) * coeff
    return result


def odd_from_even_14(n: int) -> LaurentPoly:
    """x_{2n+1} = x_{2n} x_{2n+2} - 1 in (x0, x1)"""
    product = closed_form_14(0, n) * closed_form_14(0, n + 1)
    if product.constant_term() != 1:
        raise PositivityViolation(
            f"x_{2 * n} x_{2 * n + 2} has constant term {product.constant_term()}, expected 1"
        )
    return product - 1
