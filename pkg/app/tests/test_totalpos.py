"""
Elementary-matrix factorization of the compact transfer matrices
"""

from fractions import Fraction

import pytest

from app.models import totalpos
from app.models.errors import DivisionByZero
from app.models.graphs import fundamental_domain
from app.models.linalg import identity
from app.models.qsystem import MotzkinPath, QSystem

# Every fundamental path of rank <= 3; the rank-3 ones are marked slow
PATHS = [
    pytest.param(m, id=m.to_text(), marks=[pytest.mark.slow] if m.rank == 3 else [])
    for r in (1, 2, 3)
    for m in fundamental_domain(r)
]


def test_example_sequences():
    m = MotzkinPath((2, 1, 2, 2, 2, 1, 0, 0, 1))
    sigma, tau = totalpos.sigma_tau(m)
    assert sigma == (8, 9, 7, 6, 5, 4, 2, 3, 1)
    assert tau == (9, 8, 5, 6, 7, 4, 3, 1, 2)


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_flat_path_sequences(r):
    descending = tuple(range(r, 0, -1))
    assert totalpos.sigma_tau(MotzkinPath.zero(r)) == (descending, descending)


def test_elementary_matrices():
    f = totalpos.elementary("f", 1, 5, 3)
    assert f[1][0] == 5 and f[0][0] == 1 and f[0][1] == 0
    e = totalpos.elementary("e", 2, 7, 3)
    assert e[1][2] == 7
    d = totalpos.elementary("d", 3, 2, 3)
    assert d[2][2] == 2
    with pytest.raises(IndexError):
        totalpos.elementary("f", 3, 1, 3)
    with pytest.raises(ValueError):
        totalpos.elementary("g", 1, 1, 3)


@pytest.mark.parametrize("m", PATHS)
def test_decomposition(m):
    n, b = totalpos.build_N_B(m)
    tm = totalpos.transfer_from_parts(n, b)
    assert tm.dense(0) == n and tm.dense(1) == b
    assert totalpos.check_conjugacy(m)
    assert totalpos.check_master_identity(m)


@pytest.mark.parametrize("r", [1, 2, 3, pytest.param(4, marks=pytest.mark.slow)])
def test_master_identity_flat_path(r):
    assert totalpos.check_master_identity(MotzkinPath.zero(r))


@pytest.mark.parametrize("m", PATHS)
def test_resolvent_theorem(m):
    assert totalpos.verify_resolvent_theorem(m, order=4)


def test_theorem_columns():
    assert totalpos.theorem_columns(MotzkinPath.zero(2)) == [(1, 1), (2, 1), (3, 1)]
    assert totalpos.first_ascending_endpoints(MotzkinPath((0, 1, 2))) == (1, 3)
    assert totalpos.first_ascending_endpoints(MotzkinPath.zero(3)) is None


@pytest.mark.parametrize(
    "m, branch",
    [
        ((0, 0), (1, 2)),
        ((0, 1), (1, 2, 3)),
        ((0, 1, 2), (1, 2, 3, 4)),
        ((1, 0, 1), (1, 2)),
    ],
)
def test_branch_columns(m, branch):
    assert totalpos.branch_columns(MotzkinPath(m)) == branch


@pytest.mark.parametrize("m", [(0, 0), (0, 1), (0, 0, 0), (0, 1, 2), (1, 0, 1)])
def test_run_branch_disagrees_where_f_columns_hold(m):
    report = totalpos.resolvent_report(MotzkinPath(m), order=4)
    assert report.holds
    assert not report.branch_agrees


def test_run_branch_misses_third_column_of_flat_path():
    report = totalpos.resolvent_report(MotzkinPath.zero(2), order=4)
    assert report.columns == ((1, 1), (2, 1), (3, 1))
    assert report.branch == (1, 2)


@pytest.mark.parametrize(
    "m",
    [pytest.param(MotzkinPath(m), id=",".join(map(str, m))) for m in [(0, 0), (0, 1), (1, 0), (0, 1, 0)]],
)
def test_total_positivity_at_unit_point(m):
    system = QSystem.from_path(m)
    point = {name: 1 for name in system.seed.names().values()}
    assert totalpos.check_total_positivity(m, point)


def test_total_positivity_at_zero_coordinate():
    m = MotzkinPath.zero(2)
    point = {name: 1 for name in QSystem.from_path(m).seed.names().values()}
    point["R1_0"] = 0
    with pytest.raises(DivisionByZero):
        totalpos.check_total_positivity(m, point)


def test_evaluate_matrix():
    assert totalpos.evaluate_matrix(identity(2), {}) == [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]]


def test_network_dot():
    dot = totalpos.network_dot(MotzkinPath.zero(2))
    assert dot.startswith('digraph "network_(0,0)"')
    assert "rankdir=LR;" in dot
    assert dot == totalpos.network_dot(MotzkinPath.zero(2))
    assert dot.count('[label="f') == 2 and dot.count('[label="e') == 2
