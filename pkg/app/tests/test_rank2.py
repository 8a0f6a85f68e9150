"""
Rank-2 affine cluster algebras (2,2), (1,4) and (4,1)
"""

import pytest
import sympy

from app.models import rank2
from app.models.series import TSeries

x0, x1, x2 = rank2.x_var(0), rank2.x_var(1), rank2.x_var(2)


@pytest.mark.parametrize("b, c", [pytest.param(b, c, id=f"{b}{c}") for b, c in rank2.AFFINE_CASES])
def test_exchange_relation(b, c):
    system = rank2.Rank2System(b, c)
    for n in range(-4, 6):
        assert system.x(n + 1) * system.x(n - 1) == 1 + system.x(n) ** system.exponent(n)


@pytest.mark.parametrize("b, c", [pytest.param(1, 4, id="14"), pytest.param(4, 1, id="41")])
def test_matches_rational_recursion(b, c):
    s0, s1 = sympy.symbols("x0 x1")
    values = [s0, s1]
    for n in range(1, 6):
        exponent = b if n % 2 else c
        values.append(sympy.cancel((1 + values[n] ** exponent) / values[n - 1]))
    system = rank2.Rank2System(b, c)
    for n, expected in enumerate(values):
        assert sympy.simplify(system.x(n).to_sympy() - expected) == 0


def test_mirror_symmetry_14_41():
    """x_n of (4,1) is x_{1-n} of (1,4) with x0 and x1 exchanged"""
    onefour = rank2.Rank2System(1, 4)
    fourone = rank2.Rank2System(4, 1)
    v0, v1 = onefour.variables()
    for n in range(-4, 7):
        assert fourone.x(n) == onefour.x(1 - n).substitute({v0: x1, v1: x0})
        assert onefour.x(n) == fourone.x(1 - n).substitute({v0: x1, v1: x0})


def test_unsupported_cases():
    with pytest.raises(ValueError):
        rank2.Rank2System(1, 2)
    with pytest.raises(ValueError):
        rank2.Rank2System(4, 1, k=1)


def test_conserved_quantities():
    s22 = rank2.Rank2System(2, 2)
    assert rank2.conserved_22(s22) == x1 * x0 ** -1 + x0 ** -1 * x1 ** -1 + x0 * x1 ** -1
    assert rank2.check_orbit(s22, rank2.conserved_22(s22))

    even = rank2.Rank2System(1, 4, 0)
    c0 = rank2.conserved_14(0, even)
    assert c0 == (x0 ** 4 + (1 + x1) ** 2) * x0 ** -2 * x1 ** -1
    assert rank2.check_orbit(even, c0, stride=2)

    odd = rank2.Rank2System(1, 4, 1)
    assert rank2.check_orbit(odd, rank2.conserved_14(1, odd), stride=2)
    with pytest.raises(ValueError):
        rank2.conserved_14(1, even)


def test_conserved_quantity_41():
    """The (1,4) invariant with x0 and x1 exchanged is constant on even shifts of (4,1)"""
    even = rank2.Rank2System(1, 4, 0)
    v0, v1 = even.variables()
    swapped = rank2.conserved_14(0, even).substitute({v0: x1, v1: x0})
    assert swapped == (x1 ** 4 + (1 + x0) ** 2) * x1 ** -2 * x0 ** -1
    assert rank2.check_orbit(rank2.Rank2System(4, 1), swapped, stride=2)


def test_generating_functions():
    order = 10
    s22 = rank2.Rank2System(2, 2)
    expected = TSeries([s22.x(n) for n in range(order + 1)], order)
    assert rank2.series_22(s22, order).agrees_with(expected)
    assert rank2.path_series_22(s22, order).agrees_with(expected)

    even = rank2.Rank2System(1, 4, 0)
    expected = TSeries([even.x(2 * n) for n in range(6)], 5)
    assert rank2.series_14(0, even, 5).agrees_with(expected)
    assert rank2.path_series_14(0, even, 5).agrees_with(expected)

    odd = rank2.Rank2System(1, 4, 1)
    expected = TSeries([odd.x(2 * n + 2) for n in range(6)], 5)
    assert rank2.series_14(1, odd, 5).agrees_with(expected)
    assert rank2.path_series_14(1, odd, 5).agrees_with(expected)


@pytest.mark.parametrize("case, k", [pytest.param(0, 0, id="case0"), pytest.param(1, 1, id="case1")])
def test_path_weights_relation(case, k):
    a1, a2, a3 = rank2.weights_14(case, rank2.Rank2System(1, 4, k))
    assert a1 * a3 == 1 + a2


def test_closed_forms():
    even = rank2.Rank2System(1, 4, 0)
    odd = rank2.Rank2System(1, 4, 1)
    for n in range(5):
        assert rank2.closed_form_14(0, n) == even.x(2 * n)
        assert rank2.closed_form_14(1, n) == odd.x(2 * n + 2)
    for n in range(4):
        assert rank2.odd_from_even_14(n) == even.x(2 * n + 1)
    s22 = rank2.Rank2System(2, 2)
    for n in range(11):
        assert rank2.closed_form_22(n) == s22.x(n)
    with pytest.raises(ValueError):
        rank2.closed_form_14(0, -1)


def test_multinomial():
    assert rank2.multinomial(4, 2, 1) == 12
    assert rank2.multinomial(3, 2, 2) == 0
    assert rank2.multinomial(-1, 0) == 1
    assert rank2.multinomial(5, -1) == 0
