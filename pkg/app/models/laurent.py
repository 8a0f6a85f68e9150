"""
Exact multivariate Laurent polynomials over the integers

A polynomial is a dict from an exponent key to a non-zero integer coefficient.
An exponent key is a tuple of (VarId, exponent) pairs sorted by VarId with no
zero exponents, so the empty tuple is the constant term. Sorting terms by key
gives the canonical order used for text output.
"""

from __future__ import annotations

import logging
import re
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Set, Tuple, Union

import sympy

from .errors import DivisionByZero, NonInvertibleSubstitution, NotDivisible, NotMonomial

logger = logging.getLogger(__name__)

VarId = int
Key = Tuple[Tuple[VarId, int], ...]

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_INT_RE = re.compile(r"-?\d+")
_FACTOR_RE = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)(?:\^(-?\d+))?")
_TERM_SEP = re.compile(r"\s+\+\s+")


class VariableRegistry:
    """Maps variable names to VarIds and back"""

    def __init__(self):
        self._names: List[str] = []
        self._ids: Dict[str, VarId] = {}

    def intern(self, name: str) -> VarId:
        if not _NAME_RE.fullmatch(name):
            raise ValueError(f"Invalid variable name: {name!r}")
        if name not in self._ids:
            self._ids[name] = len(self._names)
            self._names.append(name)
        return self._ids[name]

    def lookup(self, name: str) -> VarId:
        return self._ids[name]

    def name(self, var: VarId) -> str:
        return self._names[var]

    def __contains__(self, name: str) -> bool:
        return name in self._ids

    def __len__(self) -> int:
        return len(self._names)


# Process-wide registry; VarIds are assigned in first-use order
SYMBOLS = VariableRegistry()


def _merge(a: Key, b: Key) -> Key:
    if not a:
        return b
    if not b:
        return a
    out = dict(a)
    for v, e in b:
        s = out.get(v, 0) + e
        if s:
            out[v] = s
        else:
            del out[v]
    return tuple(sorted(out.items()))


def _scale(key: Key, k: int) -> Key:
    if k == 0:
        return ()
    return tuple((v, e * k) for v, e in key)


class LaurentPoly:
    """Immutable Laurent polynomial with arbitrary-precision integer coefficients"""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Mapping[Key, int]] = None):
        self._terms: Dict[Key, int] = {k: c for k, c in (terms or {}).items() if c}
        self._hash = None

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls) -> "LaurentPoly":
        return cls()

    @classmethod
    def one(cls) -> "LaurentPoly":
        return cls({(): 1})

    @classmethod
    def constant(cls, c: int) -> "LaurentPoly":
        return cls({(): c})

    @classmethod
    def variable(cls, var: VarId, exponent: int = 1) -> "LaurentPoly":
        return cls({((var, exponent),) if exponent else (): 1})

    @classmethod
    def monomial(cls, exponents: Mapping[VarId, int], coefficient: int = 1) -> "LaurentPoly":
        key = tuple(sorted((v, e) for v, e in exponents.items() if e))
        return cls({key: coefficient})

    @classmethod
    def coerce(cls, value) -> "LaurentPoly":
        if isinstance(value, LaurentPoly):
            return value
        if isinstance(value, int):
            return cls.constant(value)
        raise TypeError(f"Cannot convert {type(value).__name__} to LaurentPoly")

    # -- inspection -------------------------------------------------------

    @property
    def terms(self) -> List[Tuple[Key, int]]:
        """Terms in canonical order"""
        return sorted(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not k for k in self._terms)

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def constant_term(self) -> int:
        return self._terms.get((), 0)

    def variables(self) -> Set[VarId]:
        return {v for key in self._terms for v, _ in key}

    def degree_bounds(self, var: VarId) -> Tuple[int, int]:
        """(lowest, highest) exponent of var over all terms"""
        exps = [dict(key).get(var, 0) for key in self._terms]
        return min(exps), max(exps)

    def is_positive(self) -> bool:
        """True iff p != 0 and every coefficient is > 0"""
        return bool(self._terms) and all(c > 0 for c in self._terms.values())

    # -- ring operations --------------------------------------------------

    def __add__(self, other) -> "LaurentPoly":
        if not isinstance(other, (LaurentPoly, int)):
            return NotImplemented
        other = LaurentPoly.coerce(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0) + c
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({k: -c for k, c in self._terms.items()})

    def __sub__(self, other) -> "LaurentPoly":
        if not isinstance(other, (LaurentPoly, int)):
            return NotImplemented
        return self + (-LaurentPoly.coerce(other))

    def __rsub__(self, other) -> "LaurentPoly":
        if not isinstance(other, int):
            return NotImplemented
        return LaurentPoly.constant(other) - self

    def __mul__(self, other) -> "LaurentPoly":
        if not isinstance(other, (LaurentPoly, int)):
            return NotImplemented
        other = LaurentPoly.coerce(other)
        out: Dict[Key, int] = {}
        for ka, ca in self._terms.items():
            for kb, cb in other._terms.items():
                k = _merge(ka, kb)
                out[k] = out.get(k, 0) + ca * cb
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "LaurentPoly":
        if k < 0:
            return self.monomial_inverse() ** (-k)
        result = LaurentPoly.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def monomial_inverse(self) -> "LaurentPoly":
        """Inverse of a unit c*x^e with c = +-1"""
        if not self.is_monomial():
            raise NotMonomial(f"{self} is not a monomial")
        (key, c), = self._terms.items()
        if c not in (1, -1):
            raise NotMonomial(f"{self} is not a unit of the Laurent ring")
        return LaurentPoly({_scale(key, -1): c})

    def exact_div(self, divisor) -> "LaurentPoly":
        """
        Quotient q with q * divisor == self

        Leading-term elimination under the lexicographic order on dense
        exponent vectors. Every quotient term must lie in the box given by
        the per-variable degree bounds, which bounds the loop.

        Raises:
            NotDivisible: when no Laurent-polynomial quotient exists
        """
        divisor = LaurentPoly.coerce(divisor)
        if divisor.is_zero():
            raise DivisionByZero("Division by the zero polynomial")
        if self.is_zero():
            return LaurentPoly.zero()

        if divisor.is_monomial():
            (dkey, dc), = divisor._terms.items()
            inv = _scale(dkey, -1)
            out = {}
            for k, c in self._terms.items():
                q, rem = divmod(c, dc)
                if rem:
                    raise NotDivisible(f"Coefficient {c} is not divisible by {dc}")
                out[_merge(k, inv)] = q
            return LaurentPoly(out)

        variables = sorted(self.variables() | divisor.variables())
        box = {}
        for v in variables:
            a_lo, a_hi = self.degree_bounds(v)
            b_lo, b_hi = divisor.degree_bounds(v)
            if a_lo - b_lo > a_hi - b_hi:
                raise NotDivisible(f"({self}) / ({divisor})")
            box[v] = (a_lo - b_lo, a_hi - b_hi)

        def dense(key: Key) -> Tuple[int, ...]:
            d = dict(key)
            return tuple(d.get(v, 0) for v in variables)

        lead_b = max(divisor._terms, key=dense)
        lead_bc = divisor._terms[lead_b]
        lead_b_inv = _scale(lead_b, -1)

        remainder = dict(self._terms)
        quotient: Dict[Key, int] = {}
        while remainder:
            lead = max(remainder, key=dense)
            q_c, rem = divmod(remainder[lead], lead_bc)
            if rem:
                raise NotDivisible(f"({self}) / ({divisor})")
            q_key = _merge(lead, lead_b_inv)
            q_exps = dict(q_key)
            for v, (lo, hi) in box.items():
                if not lo <= q_exps.get(v, 0) <= hi:
                    raise NotDivisible(f"({self}) / ({divisor})")
            quotient[q_key] = q_c
            for kb, cb in divisor._terms.items():
                k = _merge(kb, q_key)
                val = remainder.get(k, 0) - q_c * cb
                if val:
                    remainder[k] = val
                else:
                    remainder.pop(k, None)
        return LaurentPoly(quotient)

    # -- comparison -------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = LaurentPoly.constant(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- evaluation -------------------------------------------------------

    def substitute(self, bindings: Mapping[VarId, Union["LaurentPoly", int]]) -> "LaurentPoly":
        """
        Replace bound variables by Laurent polynomials

        Args:
            bindings: VarId -> value; a variable occurring with a negative
                exponent must be bound to a unit monomial

        Returns:
            The substituted polynomial; unbound variables are kept
        """
        powers: Dict[Tuple[VarId, int], LaurentPoly] = {}
        out: Dict[Key, int] = {}
        for key, c in self._terms.items():
            term = LaurentPoly.constant(c)
            kept = []
            for v, e in key:
                if v not in bindings:
                    kept.append((v, e))
                    continue
                if (v, e) not in powers:
                    value = LaurentPoly.coerce(bindings[v])
                    if e < 0:
                        try:
                            value = value.monomial_inverse()
                        except NotMonomial:
                            raise NonInvertibleSubstitution(
                                f"Negative power of {SYMBOLS.name(v) if v < len(SYMBOLS) else v} "
                                f"bound to non-monomial {value}"
                            ) from None
                    powers[(v, e)] = value ** abs(e)
                term = term * powers[(v, e)]
            if kept:
                term = term * LaurentPoly({tuple(kept): 1})
            for k, tc in term._terms.items():
                out[k] = out.get(k, 0) + tc
        return LaurentPoly(out)

    def eval_rational(self, point: Mapping[VarId, Union[Fraction, int]]) -> Fraction:
        total = Fraction(0)
        for key, c in self._terms.items():
            value = Fraction(c)
            for v, e in key:
                if v not in point:
                    raise ValueError(f"Unbound variable {SYMBOLS.name(v)}")
                x = Fraction(point[v])
                if x == 0 and e < 0:
                    raise DivisionByZero(f"{SYMBOLS.name(v)} = 0 appears with exponent {e}")
                value *= x ** e
            total += value
        return total

    # -- text -------------------------------------------------------------

    def to_text(self, registry: VariableRegistry = SYMBOLS) -> str:
        """Canonical text: terms joined by ' + ', each as c*v1^e1*v2^e2"""
        if not self._terms:
            return "0"
        parts = []
        for key, c in self.terms:
            factors = "*".join(
                registry.name(v) if e == 1 else f"{registry.name(v)}^{e}" for v, e in key
            )
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append(factors)
            else:
                parts.append(f"{c}*{factors}")
        return " + ".join(parts)

    @classmethod
    def from_text(cls, text: str, registry: VariableRegistry = SYMBOLS) -> "LaurentPoly":
        text = text.strip()
        if text == "0":
            return cls.zero()
        out: Dict[Key, int] = {}
        for raw in _TERM_SEP.split(text):
            coeff = 1
            exps: Dict[VarId, int] = {}
            for piece in raw.strip().split("*"):
                piece = piece.strip()
                if _INT_RE.fullmatch(piece):
                    coeff *= int(piece)
                    continue
                m = _FACTOR_RE.fullmatch(piece)
                if not m:
                    raise ValueError(f"Cannot parse term {raw!r}")
                v = registry.intern(m.group(1))
                exps[v] = exps.get(v, 0) + int(m.group(2) or 1)
            key = tuple(sorted((v, e) for v, e in exps.items() if e))
            out[key] = out.get(key, 0) + coeff
        return cls(out)

    def to_sympy(self, registry: VariableRegistry = SYMBOLS):
        expr = sympy.Integer(0)
        for key, c in self.terms:
            term = sympy.Integer(c)
            for v, e in key:
                term *= sympy.Symbol(registry.name(v)) ** e
            expr += term
        return expr

    @classmethod
    def from_sympy(cls, expr, registry: VariableRegistry = SYMBOLS) -> "LaurentPoly":
        """Inverse of to_sympy; coefficients must be integers and exponents integral"""
        out: Dict[Key, int] = {}
        for term in sympy.Add.make_args(sympy.expand(expr)):
            coeff, rest = term.as_coeff_Mul()
            if not coeff.is_Integer:
                raise ValueError(f"Non-integer coefficient in {term}")
            exps: Dict[VarId, int] = {}
            for factor in sympy.Mul.make_args(rest):
                if factor == 1:
                    continue
                base, exp = factor.as_base_exp()
                if not base.is_Symbol or not exp.is_Integer:
                    raise ValueError(f"Cannot read {factor} as a Laurent monomial")
                v = registry.intern(base.name)
                exps[v] = exps.get(v, 0) + int(exp)
            key = tuple(sorted((v, e) for v, e in exps.items() if e))
            out[key] = out.get(key, 0) + int(coeff)
        return cls(out)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"LaurentPoly({self.to_text()!r})"


class LaurentRatio:
    """
    Unreduced quotient num/den of Laurent polynomials

    Used where a quantity only becomes a Laurent polynomial after
    cancellation. Equality is by cross-multiplication.
    """

    __slots__ = ("num", "den")
    __hash__ = None

    def __init__(self, num, den=1):
        num = LaurentPoly.coerce(num)
        den = LaurentPoly.coerce(den)
        if den.is_zero():
            raise DivisionByZero("Zero denominator")
        # unit monomial denominators are folded into the numerator
        if den.is_monomial() and abs(den.terms[0][1]) == 1:
            num = num * den.monomial_inverse()
            den = LaurentPoly.one()
        self.num = num
        self.den = den

    @classmethod
    def zero(cls) -> "LaurentRatio":
        return cls(0)

    @classmethod
    def one(cls) -> "LaurentRatio":
        return cls(1)

    @classmethod
    def coerce(cls, value) -> "LaurentRatio":
        if isinstance(value, LaurentRatio):
            return value
        return cls(LaurentPoly.coerce(value))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def __add__(self, other) -> "LaurentRatio":
        if not isinstance(other, (LaurentRatio, LaurentPoly, int)):
            return NotImplemented
        other = LaurentRatio.coerce(other)
        if self.den == other.den:
            return LaurentRatio(self.num + other.num, self.den)
        return LaurentRatio(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "LaurentRatio":
        return LaurentRatio(-self.num, self.den)

    def __sub__(self, other) -> "LaurentRatio":
        if not isinstance(other, (LaurentRatio, LaurentPoly, int)):
            return NotImplemented
        return self + (-LaurentRatio.coerce(other))

    def __rsub__(self, other) -> "LaurentRatio":
        return LaurentRatio.coerce(other) - self

    def __mul__(self, other) -> "LaurentRatio":
        if not isinstance(other, (LaurentRatio, LaurentPoly, int)):
            return NotImplemented
        other = LaurentRatio.coerce(other)
        return LaurentRatio(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "LaurentRatio":
        if not isinstance(other, (LaurentRatio, LaurentPoly, int)):
            return NotImplemented
        other = LaurentRatio.coerce(other)
        if other.is_zero():
            raise DivisionByZero("Division by a zero ratio")
        return LaurentRatio(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other) -> "LaurentRatio":
        return LaurentRatio.coerce(other) / self

    def __pow__(self, k: int) -> "LaurentRatio":
        if k < 0:
            return LaurentRatio(self.den, self.num) ** (-k)
        return LaurentRatio(self.num ** k, self.den ** k)

    def __eq__(self, other) -> bool:
        if not isinstance(other, (LaurentRatio, LaurentPoly, int)):
            return NotImplemented
        other = LaurentRatio.coerce(other)
        return self.num * other.den == other.num * self.den

    def to_laurent(self) -> LaurentPoly:
        """The quotient as a Laurent polynomial (NotDivisible if there is none)"""
        return self.num.exact_div(self.den)

    def to_sympy(self, registry: VariableRegistry = SYMBOLS):
        return self.num.to_sympy(registry) / self.den.to_sympy(registry)

    @classmethod
    def from_sympy(cls, expr, registry: VariableRegistry = SYMBOLS) -> "LaurentRatio":
        num, den = sympy.fraction(sympy.cancel(sympy.together(expr)))
        return cls(LaurentPoly.from_sympy(num, registry), LaurentPoly.from_sympy(den, registry))

    def reduced(self) -> "LaurentRatio":
        """The same ratio with common factors of num and den cancelled"""
        if self.den == 1:
            return self
        return LaurentRatio.from_sympy(self.to_sympy())

    def __str__(self) -> str:
        if self.den == 1:
            return str(self.num)
        return f"({self.num}) / ({self.den})"

    def __repr__(self) -> str:
        return f"LaurentRatio({self})"


Coefficient = Union[LaurentPoly, LaurentRatio]


def substitute_ratio(p: LaurentPoly, bindings: Mapping[VarId, Union[LaurentRatio, LaurentPoly, int]]) -> LaurentRatio:
    """Substitute ratios for variables; negative powers invert the binding"""
    powers: Dict[Tuple[VarId, int], LaurentRatio] = {}
    total = LaurentRatio.zero()
    for key, c in p.terms:
        term = LaurentRatio(c)
        kept = []
        for v, e in key:
            if v not in bindings:
                kept.append((v, e))
                continue
            if (v, e) not in powers:
                powers[(v, e)] = LaurentRatio.coerce(bindings[v]) ** e
            term = term * powers[(v, e)]
        if kept:
            term = term * LaurentPoly({tuple(kept): 1})
        total = total + term
    return total


def var(name: str, registry: VariableRegistry = SYMBOLS) -> LaurentPoly:
    """The variable called name as a polynomial"""
    return LaurentPoly.variable(registry.intern(name))


def ring_zero(sample: Coefficient) -> Coefficient:
    return LaurentRatio.zero() if isinstance(sample, LaurentRatio) else LaurentPoly.zero()


def ring_one(sample: Coefficient) -> Coefficient:
    return LaurentRatio.one() if isinstance(sample, LaurentRatio) else LaurentPoly.one()
