"""
Laurent polynomial arithmetic: ring laws, exact division, substitution, text
"""

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from app.models.errors import DivisionByZero, NonInvertibleSubstitution, NotDivisible, NotMonomial
from app.models.laurent import SYMBOLS, LaurentPoly, LaurentRatio, substitute_ratio, var

a, b, c = var("ta"), var("tb"), var("tc")


def build(terms):
    p = LaurentPoly.zero()
    for (i, j), coeff in terms.items():
        p = p + a ** i * b ** j * coeff
    return p


polys = st.dictionaries(
    keys=st.tuples(st.integers(-2, 2), st.integers(-2, 2)),
    values=st.integers(-3, 3),
    max_size=4,
).map(build)

nonzero_polys = polys.filter(lambda p: not p.is_zero())

monomials = st.tuples(st.integers(-2, 2), st.integers(-2, 2), st.sampled_from([1, -1])).map(
    lambda t: a ** t[0] * c ** t[1] * t[2]
)


@pytest.mark.slow
@settings(max_examples=60, deadline=None)
@given(polys, polys, polys)
def test_ring_laws(p, q, s):
    assert p * (q + s) == p * q + p * s
    assert (p * q) * s == p * (q * s)
    assert p + q == q + p
    assert p - p == 0


@pytest.mark.slow
@settings(max_examples=60, deadline=None)
@given(polys, nonzero_polys)
def test_exact_division_recovers_factor(p, q):
    assert (p * q).exact_div(q) == p


@pytest.mark.slow
@settings(max_examples=40, deadline=None)
@given(polys, polys, monomials)
def test_substitution_is_a_homomorphism(p, q, m):
    bindings = {SYMBOLS.lookup("tb"): m}
    assert (p * q).substitute(bindings) == p.substitute(bindings) * q.substitute(bindings)
    assert (p + q).substitute(bindings) == p.substitute(bindings) + q.substitute(bindings)


@pytest.mark.slow
@settings(max_examples=40, deadline=None)
@given(polys)
def test_text_round_trip(p):
    assert LaurentPoly.from_text(p.to_text()) == p


def test_basic_identities():
    assert (a + 1) * (a - 1) == a ** 2 - 1
    assert a ** -2 * a ** 2 == 1
    assert (a * b) ** -1 == a ** -1 * b ** -1
    assert LaurentPoly.zero().to_text() == "0"


def test_exact_division_with_negative_exponents():
    q = b + a ** -1
    assert ((a ** 2 + 1) * q).exact_div(q) == a ** 2 + 1


@pytest.mark.parametrize(
    "num, den",
    [
        pytest.param(a + 1, a + 2, id="linear"),
        pytest.param(a ** 2 + b, a + b, id="two-vars"),
        pytest.param(3 * a, 2 * a, id="coefficient"),
    ],
)
def test_not_divisible(num, den):
    with pytest.raises(NotDivisible):
        num.exact_div(den)


def test_division_by_zero():
    with pytest.raises(DivisionByZero):
        a.exact_div(LaurentPoly.zero())
    with pytest.raises(DivisionByZero):
        LaurentRatio(a, 0)


def test_monomial_inverse_needs_unit():
    assert (-a * b).monomial_inverse() == -(a ** -1) * b ** -1
    with pytest.raises(NotMonomial):
        (2 * a).monomial_inverse()
    with pytest.raises(NotMonomial):
        (a + 1).monomial_inverse()


def test_negative_power_needs_monomial_binding():
    p = a ** -1 + b
    with pytest.raises(NonInvertibleSubstitution):
        p.substitute({SYMBOLS.lookup("ta"): b + 1})
    assert p.substitute({SYMBOLS.lookup("ta"): b ** 2}) == b ** -2 + b


def test_positivity():
    assert (a + a ** -1 * b + 2).is_positive()
    assert not (a - 1).is_positive()
    assert not LaurentPoly.zero().is_positive()


def test_sympy_agrees():
    p = (a + b ** -1) * (a - 2 * b)
    ta, tb = sympy.symbols("ta tb")
    assert sympy.expand(p.to_sympy() - (ta + 1 / tb) * (ta - 2 * tb)) == 0


def test_ratio_arithmetic():
    r = LaurentRatio(a ** 2 - 1, a - 1)
    assert r == a + 1
    assert r.to_laurent() == a + 1
    assert LaurentRatio(1, a + 1) + LaurentRatio(a, a + 1) == 1
    assert a + LaurentRatio(1, a + 1) == LaurentRatio(a ** 2 + a + 1, a + 1)
    with pytest.raises(NotDivisible):
        LaurentRatio(a, a + 1).to_laurent()


def test_substitute_ratio():
    bound = substitute_ratio(a * b + a ** -1, {SYMBOLS.lookup("ta"): LaurentRatio(b, b + 1)})
    assert bound == LaurentRatio(b ** 2 * b + (b + 1) ** 2, b * (b + 1))
