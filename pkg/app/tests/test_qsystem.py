"""
Q-system values, conserved quantities, hard particles and seed weights
"""

import pytest
import sympy

from app import config
from app.models import qsystem
from app.models.errors import MotzkinViolation, SeedFileError
from app.models.graphs import fundamental_domain
from app.models.laurent import LaurentRatio, var
from app.models.qsystem import MotzkinPath, QSystem

x0, x1 = var("R1_0"), var("R1_1")

# Every fundamental path of rank <= 3; the rank-3 ones are marked slow
PATHS = [
    pytest.param(m, id=m.to_text(), marks=[pytest.mark.slow] if m.rank == 3 else [])
    for r in (1, 2, 3)
    for m in fundamental_domain(r)
]


def test_motzkin_path_validation():
    assert MotzkinPath.from_text("0, 1,2").m == (0, 1, 2)
    assert MotzkinPath((0, 1, 0))[2] == 1
    assert str(MotzkinPath((1, 0))) == "(1,0)"
    with pytest.raises(MotzkinViolation):
        MotzkinPath((0, 2))
    with pytest.raises(MotzkinViolation):
        MotzkinPath.from_text("0,a")
    with pytest.raises(MotzkinViolation):
        MotzkinPath((0, 0)).bumped(1, 2)


def test_a1_values():
    system = QSystem.from_path((0,))
    assert system.R(1, 0) == x0
    assert system.R(1, 2) == (x1 ** 2 + 1) * x0 ** -1
    assert system.R(1, -1) == (x0 ** 2 + 1) * x1 ** -1
    assert system.R(1, 3) == ((x1 ** 2 + 1) ** 2 + x0 ** 2) * x0 ** -2 * x1 ** -1


def test_a1_matches_rational_recursion():
    """R_{n+1} = (R_n^2 + 1) / R_{n-1} computed by sympy"""
    s0, s1 = sympy.symbols("R1_0 R1_1")
    values = [s0, s1]
    for _ in range(4):
        values.append(sympy.cancel((values[-1] ** 2 + 1) / values[-2]))
    system = QSystem.from_path((0,))
    for n, expected in enumerate(values):
        assert sympy.simplify(system.R(1, n).to_sympy() - expected) == 0


def test_boundary_rows_are_one():
    system = QSystem.from_path((0, 0))
    assert system.R(0, 5) == 1
    assert system.R(3, -2) == 1
    with pytest.raises(IndexError):
        qsystem.compute_R(system, 3, 0)


@pytest.mark.parametrize("m", PATHS)
def test_determinant_formula(m):
    system = QSystem.from_path(m)
    for alpha in range(1, m.rank + 1):
        for n in range(m[alpha] - 1, m[alpha] + 2):
            assert qsystem.det_formula_R(system, alpha, n) == system.R(alpha, n)


@pytest.mark.parametrize("m", PATHS)
def test_positivity_window(m):
    system = QSystem.from_path(m)
    lo, hi = config.POSITIVITY_WINDOW
    assert (lo, hi) == (-6, 6)
    for alpha in range(1, m.rank + 1):
        for n in range(m[alpha] + lo, m[alpha] + hi + 1):
            assert system.R(alpha, n).is_positive(), f"R_({alpha},{n}) in seed {m}"


def test_a1_conserved_quantity():
    system = QSystem.from_path((0,))
    expected = x1 * x0 ** -1 + x0 ** -1 * x1 ** -1 + x0 * x1 ** -1
    assert qsystem.conserved_c(system, 1, 0) == expected
    assert qsystem.check_conservation(system, 1) == expected


@pytest.mark.parametrize("r", [1, 2, 3])
def test_linear_recursion(r):
    c = qsystem.recursion_coefficients(QSystem.from_path(MotzkinPath.zero(r)))
    assert len(c) == r + 2
    assert c[0] == 1 and c[r + 1] == 1


def test_hard_particle_fixtures():
    y1, y2, y3 = qsystem.abstract_weights(1).y
    assert qsystem.hard_particle_partition(1, [y1, y2, y3]) == [1, y1 + y2 + y3, y1 * y3]
    assert qsystem.hard_particle_partition(0, [y1]) == [1, y1]


@pytest.mark.parametrize("r", [0, 1, 2, 3, 4, 5])
def test_hard_particle_brute_force(r):
    weights = qsystem.abstract_weights(r).y
    g = qsystem.HardParticleGraph(r)
    z = qsystem.hard_particle_partition(r, weights)
    for k in range(r + 2):
        assert qsystem.hard_particle_brute_force(g, weights, k) == z[k]
        assert qsystem.hard_particle_Z(g, weights, k) == z[k]
    assert qsystem.hard_particle_Z(g, weights, r + 2) == 0


@pytest.mark.parametrize("r", [1, 2, 3])
def test_conserved_quantities_are_partition_functions(r):
    """c_p in the seed x_0 equals Z_p of G_r at the seed weights"""
    system = QSystem.from_path(MotzkinPath.zero(r))
    weights = qsystem.weights_from_seed(system).y
    z = qsystem.hard_particle_partition(r, weights)
    g = qsystem.HardParticleGraph(r)
    for p in range(r + 2):
        assert qsystem.conserved_c(system, p, 0) == z[p]
        assert qsystem.hard_particle_Z(g, weights, p) == z[p]


def test_seed_weights_a1():
    y = qsystem.weights_from_seed(QSystem.from_path((0,))).y
    assert y == (x1 * x0 ** -1, x0 ** -1 * x1 ** -1, x0 * x1 ** -1)


def test_weights_at_time_keep_partition_functions():
    system = QSystem.from_path(MotzkinPath.zero(2))
    at0 = qsystem.hard_particle_partition(2, qsystem.weights_at_time(system, 0).y)
    at2 = qsystem.hard_particle_partition(2, qsystem.weights_at_time(system, 2).y)
    assert all(LaurentRatio.coerce(u) == v for u, v in zip(at0, at2))


def test_mutation_round_trip():
    m = MotzkinPath((0, 0, 0))
    values = QSystem.from_path(m).seed.initial_values()
    path, moved = qsystem.mutate(m, values, 2, "forward")
    assert path == MotzkinPath((0, 1, 0))
    assert moved[(2, 2)] == QSystem.from_path(m).R(2, 2)
    back_path, back = qsystem.mutate(path, moved, 2, "backward")
    assert back_path == m and back == values
    with pytest.raises(ValueError):
        qsystem.mutate(m, values, 2, "sideways")


def test_swap_halves_reflects_time():
    system = QSystem.from_path(MotzkinPath.zero(2))
    swap = qsystem.swap_halves(system.seed)
    for alpha in (1, 2):
        assert system.R(alpha, -1).substitute(swap) == system.R(alpha, 2)
    with pytest.raises(ValueError):
        qsystem.swap_halves(QSystem.from_path((0, 1)).seed)


def test_read_seed_file(tmp_path):
    seed_file = tmp_path / "seed.txt"
    seed_file.write_text("# A_2 at m = (1,0)\nR 1 1 = p\nR 1 2 = q\n\nR 2 0 = u\nR 2 1 = v\n", encoding="utf-8")
    seed = qsystem.read_seed_file(seed_file)
    assert seed.path == MotzkinPath((1, 0))
    system = QSystem(seed)
    p, u, v = var("p"), var("u"), var("v")
    assert system.R(2, 2) == (v ** 2 + p) * u ** -1


@pytest.mark.parametrize(
    "text",
    [
        pytest.param("R 1 0 = a\nR 1 0 = b\n", id="duplicate"),
        pytest.param("R 1 0 = a\nR 1 2 = b\n", id="gap"),
        pytest.param("R one 0 = a\n", id="malformed"),
        pytest.param("R 1 0 = a\nR 1 1 = b\nR 2 2 = c\nR 2 3 = d\n", id="not-motzkin"),
        pytest.param("# nothing\n", id="empty"),
    ],
)
def test_bad_seed_files(tmp_path, text):
    seed_file = tmp_path / "seed.txt"
    seed_file.write_text(text, encoding="utf-8")
    with pytest.raises(SeedFileError):
        qsystem.read_seed_file(seed_file)
