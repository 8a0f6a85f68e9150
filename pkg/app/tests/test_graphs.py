"""
Graphs Gamma_m, resolvents, continued fractions, mutations and LGV families
"""

import pytest

from app import config
from app.models import graphs
from app.models.errors import CaseMismatch, NonExactWeight, NotNilpotent
from app.models.laurent import LaurentPoly, LaurentRatio
from app.models.qsystem import MotzkinPath, QSystem, abstract_weights, weights_from_seed
from app.models.series import TSeries

EXAMPLE_PATH = MotzkinPath((2, 1, 2, 2, 2, 1, 0, 0, 1))
# Every fundamental path of rank <= 3; the rank-3 ones are marked slow
PATHS = [
    pytest.param(m, id=m.to_text(), marks=[pytest.mark.slow] if m.rank == 3 else [])
    for r in (1, 2, 3)
    for m in graphs.fundamental_domain(r)
]


def root_sum(graph, n):
    total = LaurentPoly.zero()
    for walk in graphs.enumerate_paths(graph, graphs.ROOT, graphs.ROOT, n):
        total = total + walk.weight
    return total


@pytest.mark.parametrize("r, count", [(1, 1), (2, 3), (3, 9), (4, 27)])
def test_fundamental_domain_size(r, count):
    paths = graphs.fundamental_domain(r)
    assert len(paths) == count
    assert all(m.is_fundamental() for m in paths)
    assert paths == sorted(paths, key=lambda m: m.m)


def test_vertex_labels():
    assert graphs.parse_vertex("2'") == (2, True)
    assert graphs.parse_vertex(" 7 ") == (7, False)
    assert graphs.vertex_label((5, True)) == "5'"
    assert sorted([(3, False), (2, True), (2, False)]) == [(2, False), (2, True), (3, False)]


def test_example_layout():
    assert graphs.descending_segments(EXAMPLE_PATH) == [[1, 2], [3], [4], [5, 6, 7], [8], [9]]
    layout = graphs.gamma_layout(EXAMPLE_PATH)
    assert layout.extra == [(3, 1), (8, 6), (9, 6), (9, 7)]
    primes = [v[0] for v in layout.vertices if v[1]]
    assert primes == [2, 5, 6, 7, 8, 9]
    assert max(v[0] for v in layout.vertices) == 13
    assert len(layout.skeleton) == 19


def test_example_extra_weights():
    y = (None,) + abstract_weights(9).y
    weights = abstract_weights(9)
    assert graphs.extra_weight(EXAMPLE_PATH, 3, 1, weights) == y[2] * y[4] * y[3] ** -1
    assert graphs.extra_weight(EXAMPLE_PATH, 9, 7, weights) == y[14] * y[12] * y[13] ** -1
    assert graphs.extra_weight(EXAMPLE_PATH, 8, 6, weights) == y[12] * y[10] * y[11] ** -1
    assert graphs.extra_weight(EXAMPLE_PATH, 9, 6, weights) == y[14] * y[12] * y[10] * (y[13] * y[11]) ** -1


def test_edges_must_be_well_formed():
    graph = graphs.WeightedDigraph([(0, False), (1, False)])
    graph.add_edge((0, False), (1, False), 0, LaurentPoly.one())
    with pytest.raises(ValueError):
        graph.add_edge((1, False), (0, False), 0, LaurentPoly.one())
    with pytest.raises(ValueError):
        graph.add_edge((1, False), (0, False), 1, LaurentPoly.zero())
    with pytest.raises(ValueError):
        graph.add_edge((0, False), (1, False), 0, LaurentPoly.one())
    with pytest.raises(ValueError):
        graph.add_edge((0, False), (4, False), 1, LaurentPoly.one())


def test_cyclic_t0_part_is_rejected():
    tm = graphs.TransferMatrix(2)
    tm.add(0, 1, 0, LaurentPoly.one())
    tm.add(1, 0, 0, LaurentPoly.one())
    assert not tm.is_nilpotent()
    with pytest.raises(NotNilpotent):
        graphs.resolvent_series(tm, 0, 0, 3)


def test_hard_particle_determinant():
    weights = abstract_weights(1)
    y1, y2, y3 = weights.y
    assert graphs.hard_particle_det(1, weights) == TSeries([1, y1 + y2 + y3, y1 * y3])


@pytest.mark.parametrize("r", [0, 1, 2, 3])
def test_heap_identity(r):
    weights = abstract_weights(r)
    resolvent = graphs.path_series(graphs.build_g_tilde(r, weights), graphs.ROOT, graphs.ROOT, 6)
    assert resolvent.agrees_with(graphs.heap_series(r, weights, 6))


@pytest.mark.parametrize("r", [0, 1, 2, 3])
def test_continued_fraction_and_rearrangements(r):
    weights = abstract_weights(r)
    resolvent = graphs.path_series(graphs.build_g_tilde(r, weights), graphs.ROOT, graphs.ROOT, 6)
    cf = graphs.continued_fraction(r, weights)
    assert cf.depth == r + 2
    assert graphs.eval_cf(cf, 6).agrees_with(resolvent)
    assert graphs.eval_cf(graphs.rearrange_R1(cf), 6).agrees_with(resolvent)

    ratios = [LaurentRatio.coerce(y) for y in weights.y]
    symbolic = graphs.continued_fraction(r, ratios)
    rearranged = graphs.rearrange_R2(symbolic, symbolic.depth - 2)
    assert rearranged.depth == symbolic.depth + 1
    assert graphs.eval_cf(rearranged, 6).agrees_with(resolvent)


def test_rearrangement_errors():
    y1, y2, y3 = abstract_weights(1).y
    with pytest.raises(NonExactWeight):
        graphs.r2_weights(y1, y2, y3)
    cf = graphs.continued_fraction(1, abstract_weights(1))
    with pytest.raises(ValueError):
        graphs.rearrange_R2(cf, 0)


def test_stieltjes_fraction_of_single_edge():
    weights = abstract_weights(0)
    y = weights.y[0]
    numerator, denominator = graphs.resolvent_fraction(graphs.build_g_tilde(0, weights))
    assert numerator == TSeries.one(2)
    assert denominator == TSeries([1, -y, 0])
    assert graphs.stieltjes_fraction(numerator, denominator).levels == ((y, None),)


@pytest.mark.parametrize("r", [1, 2])
def test_stieltjes_fraction_of_flat_path(r):
    weights = abstract_weights(r)
    graph = graphs.build_g_tilde(r, weights)
    resolvent = graphs.path_series(graph, graphs.ROOT, graphs.ROOT, 6)
    cf = graphs.stieltjes_fraction(*graphs.resolvent_fraction(graph))
    assert all(not c for c, _ in cf.levels[:-1])
    assert graphs.eval_cf(cf, 6).agrees_with(resolvent)


@pytest.mark.parametrize("m", PATHS)
def test_continued_fraction_every_path(m):
    weights = abstract_weights(m.rank)
    resolvent = graphs.path_series(graphs.build_gamma(m, weights), graphs.ROOT, graphs.ROOT, 6)
    assert graphs.eval_cf(graphs.continued_fraction(m, weights), 6).agrees_with(resolvent)

@pytest.mark.parametrize("m", PATHS)
def test_enumeration_matches_resolvent(m):
    gamma = graphs.build_gamma(m)
    series = graphs.path_series(gamma, graphs.ROOT, graphs.ROOT, 4)
    for n in range(5):
        assert root_sum(gamma, n) == series[n]


def test_enumeration_limits():
    gamma = graphs.build_gamma(MotzkinPath((0,)))
    with pytest.raises(ValueError):
        graphs.enumerate_paths(gamma, graphs.ROOT, graphs.ROOT, config.MAX_DOWN_STEPS + 1)


@pytest.mark.parametrize("m", PATHS)
def test_rerooted_series_gives_q_system(m):
    system = QSystem.from_path(m)
    series = graphs.rerooted_series(system, 5)
    for n in range(6):
        assert series[n] == system.R(1, n)


@pytest.mark.parametrize("m", PATHS)
def test_lgv_determinant(m):
    system = QSystem.from_path(m)
    for alpha in range(1, m.rank + 1):
        for n in range(alpha - 1, alpha + 1):
            assert graphs.lgv_R(system, alpha, n) == system.R(alpha, n + m[1])
    with pytest.raises(ValueError):
        graphs.lgv_R(system, m.rank, m.rank - 2)


def test_six_non_intersecting_pairs():
    system = QSystem.from_path(MotzkinPath.zero(2))
    gamma = graphs.build_gamma(system.path, weights_from_seed(system))
    families = graphs.lgv_families(gamma, 2, 3)
    assert len(families) == 6
    weight = graphs.family_weight(families)
    assert weight * system.R(1, 0) ** 2 == system.R(2, 3)


def test_step_displacement():
    assert graphs.step_displacement((0, False), (1, False)) == 1
    assert graphs.step_displacement((2, False), (2, True)) == 0
    assert graphs.step_displacement((2, True), (2, False)) == 2
    assert graphs.step_displacement((1, False), (0, False)) == 1
    assert graphs.step_displacement((3, False), (1, False)) == 0


@pytest.mark.parametrize(
    "m, alpha, case",
    [
        pytest.param((0, 0, 0), 1, "ii", id="left-end"),
        pytest.param((0, 0, 0), 2, "ii", id="flat"),
        pytest.param((0, 0, 0), 3, "i", id="right-end"),
        pytest.param((0, 1, 2), 1, "i", id="ascending"),
        pytest.param((1, 1, 2), 2, "i", id="flat-then-up"),
    ],
)
def test_mutation_case(m, alpha, case):
    assert graphs.mutation_case(MotzkinPath(m), alpha) == case


def test_mutation_case_mismatch():
    with pytest.raises(CaseMismatch):
        graphs.mutation_case(MotzkinPath((0, 1, 2)), 2)
    with pytest.raises(CaseMismatch):
        graphs.mutation_case(MotzkinPath((1, 1, 0)), 2)
    assert graphs.admissible_mutations(MotzkinPath((0, 1, 2))) == [1]


@pytest.mark.parametrize("m", PATHS)
def test_mutated_weights_match_new_seed(m):
    for alpha in graphs.admissible_mutations(m):
        assert graphs.check_mutation(m, alpha)


def test_mutation_at_first_node_matches_rerooted_fraction():
    weights = abstract_weights(1)
    ratios = [LaurentRatio.coerce(y) for y in weights.y]
    led = graphs.rearrange_R1(graphs.continued_fraction(1, ratios))
    rerooted = graphs.rearrange_R2(graphs.ContinuedFraction(led.levels), 0)
    mutated = graphs.mutate_weights(MotzkinPath((0,)), 1, weights)
    assert mutated.path == MotzkinPath((1,))
    assert rerooted.levels == graphs.continued_fraction(1, mutated).levels


def test_dot_export_is_deterministic():
    m = MotzkinPath((0, 1, 0))
    first = graphs.build_gamma(m).to_dot()
    assert first == graphs.build_gamma(m).to_dot()
    assert first.startswith('digraph "Gamma_(0,1,0)"')
    assert '"0" -> "1" [label="[1] t^0 * 1"];' in first
