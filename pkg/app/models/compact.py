"""
Compact graphs Gamma'_m on r+1 vertices

compactify() merges consecutive vertex pairs of Gamma_m and patches maximal
vertical chains with +-1 up edges; build_gamma_prime_direct() builds the
same graph straight from the segments of m.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from app import config

from .graphs import (
    ROOT,
    Vertex,
    Weights,
    WeightedDigraph,
    _ys,
    build_gamma,
    descending_segments,
    enumerate_paths,
    path_series,
    vertex_label,
)
from .laurent import Coefficient, LaurentPoly, LaurentRatio
from .qsystem import MotzkinPath, QSystem, abstract_weights, weights_from_seed
from .rank2 import multinomial
from .series import TSeries

logger = logging.getLogger(__name__)

COMPACT_ROOT: Vertex = (1, False)


def _v(j: int) -> Vertex:
    return (j, False)


@dataclass
class CompactGraph:
    """Gamma'_m plus, when built by compactify(), the pair merged into each vertex"""

    graph: WeightedDigraph
    path: MotzkinPath
    merge: Dict[int, Tuple[Vertex, Vertex]] = field(default_factory=dict)

    @property
    def rank(self) -> int:
        return self.path.rank

    def transfer_matrix(self):
        return self.graph.transfer_matrix()

    def same_as(self, other: "CompactGraph") -> bool:
        return self.graph.same_as(other.graph)

    def merge_text(self) -> str:
        lines = [
            f"{j}: {vertex_label(a)} ~ {vertex_label(b)}"
            for j, (a, b) in sorted(self.merge.items())
        ]
        return "\n".join(lines) + "\n"

    def to_dot(self) -> str:
        return self.graph.to_dot()


def ascending_segments(m: MotzkinPath) -> List[List[int]]:
    """Maximal runs alpha, alpha+1, ... with m_{alpha+1} = m_alpha + 1"""
    segments = [[1]]
    for a in range(2, m.rank + 1):
        if m[a] == m[a - 1] + 1:
            segments[-1].append(a)
        else:
            segments.append([a])
    return segments


def _correction_edges(bottom: int, k: int) -> List[Tuple[int, int, int]]:
    """Up edges j -> j+2+a with weight (-1)^(a+1) over a chain of k merged pairs"""
    edges = []
    for j in range(k):
        for a in range(k - j):
            edges.append((bottom + j, bottom + j + 2 + a, (-1) ** (a + 1)))
    return edges


def compactify(gamma: WeightedDigraph, m: MotzkinPath) -> CompactGraph:
    """
    Merge vertices 2j-1, 2j of Gamma_m (in the order i < i' < i+1) into j

    Edges inside a pair become a loop carrying their product. Maximal runs
    of vertical pairs (two spine vertices, neither the bottom nor the top
    pair) get the inclusion-exclusion up edges.
    """
    order = gamma.vertices
    if len(order) != 2 * m.rank + 2:
        raise ValueError(f"Gamma_{m} has {len(order)} vertices, expected {2 * m.rank + 2}")
    compact_of: Dict[Vertex, int] = {v: pos // 2 + 1 for pos, v in enumerate(order)}
    merge = {j: (order[2 * j - 2], order[2 * j - 1]) for j in range(1, m.rank + 2)}

    cells: Dict[Tuple[int, int], Tuple[int, Coefficient]] = {}
    loops: Dict[int, Coefficient] = {}
    for e in gamma.edges:
        a, b = compact_of[e.source], compact_of[e.target]
        if a == b:
            loops[a] = loops[a] * e.weight if a in loops else e.weight
            continue
        if (a, b) in cells:
            degree, weight = cells[(a, b)]
            if degree != e.t_degree:
                raise ValueError(f"Edges {a}->{b} of different t-degree after merging")
            cells[(a, b)] = (degree, weight + e.weight)
        else:
            cells[(a, b)] = (e.t_degree, e.weight)

    vertical = [
        j for j, (lo, hi) in merge.items()
        if 1 < j < m.rank + 1 and not lo[1] and not hi[1]
    ]
    runs: List[List[int]] = []
    for j in vertical:
        if runs and runs[-1][-1] == j - 1:
            runs[-1].append(j)
        else:
            runs.append([j])
    for run in runs:
        for a, b, sign in _correction_edges(run[0] - 1, len(run)):
            cells[(a, b)] = (0, LaurentPoly.constant(sign))
        logger.debug("Vertical chain %s in Gamma_%s", run, m)

    graph = WeightedDigraph([_v(j) for j in merge], COMPACT_ROOT, name=f"Gamma'_{m}")
    for j in sorted(loops):
        graph.add_edge(_v(j), _v(j), 1, loops[j])
    for (a, b), (degree, weight) in sorted(cells.items()):
        graph.add_edge(_v(a), _v(b), degree, weight)
    return CompactGraph(graph, m, merge)


def _descending_weight(ys: Sequence[Coefficient], low: int, high: int) -> Coefficient:
    """prod_{j=low}^{high-1} y_{2j} / prod_{j=low+1}^{high-1} y_{2j-1}"""
    num: Coefficient = LaurentPoly.one()
    den: Coefficient = LaurentPoly.one()
    for j in range(low, high):
        num = num * ys[2 * j - 1]
    for j in range(low + 1, high):
        den = den * ys[2 * j - 2]
    if isinstance(num, LaurentRatio) or isinstance(den, LaurentRatio):
        return LaurentRatio.coerce(num) / den
    return num.exact_div(den)


def build_gamma_prime_direct(m: MotzkinPath, weights: Optional[Weights] = None) -> CompactGraph:
    """G~'_r plus the edges contributed by descending and ascending runs of m"""
    r = m.rank
    ys = _ys(weights if weights is not None else abstract_weights(r))
    graph = WeightedDigraph([_v(j) for j in range(1, r + 2)], COMPACT_ROOT, name=f"Gamma'_{m}")
    for i in range(1, r + 2):
        graph.add_edge(_v(i), _v(i), 1, ys[2 * i - 2])
    for i in range(1, r + 1):
        graph.add_edge(_v(i), _v(i + 1), 0, LaurentPoly.one())
        graph.add_edge(_v(i + 1), _v(i), 1, ys[2 * i - 1])

    for seg in descending_segments(m):
        alpha, length = seg[0], len(seg)
        for q in range(length):
            for p in range(q + 2, length + 1):
                graph.add_edge(_v(alpha + p), _v(alpha + q), 1, _descending_weight(ys, alpha + q, alpha + p))
    for seg in ascending_segments(m):
        alpha, length = seg[0], len(seg)
        for q in range(length):
            for p in range(q + 2, length + 1):
                graph.add_edge(_v(alpha + q), _v(alpha + p), 0, LaurentPoly.constant((-1) ** (p - q - 1)))
    return CompactGraph(graph, m)


def compact_graph(m: MotzkinPath, weights: Optional[Weights] = None) -> CompactGraph:
    """compactify(build_gamma(m))"""
    return compactify(build_gamma(m, weights), m)


# -- the vertical chain lemma ------------------------------------------------


def h_chain(k: int, weights: Optional[Sequence[Coefficient]] = None) -> WeightedDigraph:
    """H~_k: vertical chain 0..2k+1, down edge i+1 -> i weighted y_{i+1}"""
    ys = list(weights) if weights is not None else list(abstract_weights(k).y)
    if len(ys) != 2 * k + 1:
        raise ValueError(f"H~_{k} needs {2 * k + 1} weights, got {len(ys)}")
    graph = WeightedDigraph([_v(i) for i in range(2 * k + 2)], ROOT, name=f"H~_{k}")
    for i in range(2 * k + 1):
        graph.add_edge(_v(i), _v(i + 1), 0, LaurentPoly.one())
        graph.add_edge(_v(i + 1), _v(i), 1, ys[i])
    return graph


def h_chain_compact(k: int, weights: Optional[Sequence[Coefficient]] = None) -> WeightedDigraph:
    """H~'_k: pairs 2i+1, 2i+2 merged into i+1, loops y_{2i+2}, up edges (-1)^(a+1)"""
    ys = list(weights) if weights is not None else list(abstract_weights(k).y)
    if len(ys) != 2 * k + 1:
        raise ValueError(f"H~'_{k} needs {2 * k + 1} weights, got {len(ys)}")
    graph = WeightedDigraph([_v(i) for i in range(k + 2)], ROOT, name=f"H~'_{k}")
    for i in range(1, k + 1):
        graph.add_edge(_v(i), _v(i), 1, ys[2 * i - 1])
    for i in range(k + 1):
        graph.add_edge(_v(i), _v(i + 1), 0, LaurentPoly.one())
        graph.add_edge(_v(i + 1), _v(i), 1, ys[2 * i])
    for a, b, sign in _correction_edges(0, k):
        graph.add_edge(_v(a), _v(b), 0, LaurentPoly.constant(sign))
    return graph


def verify_hk_lemma(k: int, weights: Optional[Sequence[Coefficient]] = None, order: int = config.DEFAULT_ORDER) -> bool:
    """Root-to-root series of H~_k and H~'_k agree, by series solve and by enumeration"""
    if k > config.MAX_HK_CHAIN:
        raise ValueError(f"k={k} exceeds the chain bound {config.MAX_HK_CHAIN}")
    chain, compact = h_chain(k, weights), h_chain_compact(k, weights)
    lhs = path_series(chain, ROOT, ROOT, order)
    rhs = path_series(compact, ROOT, ROOT, order)
    if not lhs.agrees_with(rhs):
        logger.debug("H~_%d: series differ", k)
        return False
    for n in range(min(order, 4) + 1):
        for graph, series in ((chain, lhs), (compact, rhs)):
            total: Coefficient = LaurentPoly.zero()
            for walk in enumerate_paths(graph, ROOT, ROOT, n):
                total = total + walk.weight
            if total != series[n]:
                logger.debug("%s: enumeration differs at n=%d", graph.name, n)
                return False
    return True


# -- resolvent identities ----------------------------------------------------


def verify_resolvent_equality(m: MotzkinPath, order: int = config.DEFAULT_ORDER, weights: Optional[Weights] = None) -> bool:
    """((I - T_m)^{-1})_{1,1} == ((I - T'_m)^{-1})_{1,1} up to t^order"""
    weights = weights if weights is not None else abstract_weights(m.rank)
    gamma = build_gamma(m, weights)
    lhs = path_series(gamma, (1, False), (1, False), order)
    rhs = path_series(compact_graph(m, weights).graph, COMPACT_ROOT, COMPACT_ROOT, order)
    ok = lhs.agrees_with(rhs)
    logger.debug("Gamma_%s vs Gamma'_%s at (1,1), order %d: %s", m, m, order, ok)
    return ok


def closed_form_prime(system: QSystem, order: int) -> TSeries:
    """sum_n t^n R_{1,n+m_1+1} / R_{1,m_1+1}"""
    m1 = system.path[1]
    base = system.R(1, m1 + 1)
    return TSeries([system.R(1, n + m1 + 1).exact_div(base) for n in range(order + 1)], order)


def compact_series(system: QSystem, order: int) -> TSeries:
    """Root-to-root series of Gamma'_m with the seed weights of system"""
    graph = compact_graph(system.path, weights_from_seed(system)).graph
    return path_series(graph, COMPACT_ROOT, COMPACT_ROOT, order)


def _compositions(n: int, parts: int):
    """All tuples of `parts` non-negative integers summing to n"""
    for bars in itertools.combinations(range(n + parts - 1), parts - 1):
        prev = -1
        out = []
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(n + parts - 1 - prev - 1)
        yield tuple(out)


def closed_expansion_m0(r: int, n: int) -> LaurentPoly:
    """
    R_{1,n+1} in the seed x_0 from the expanded compact continued fraction

    Sum over p_1..p_{2r+1} >= 0 with sum n of prod y_i^{p_i} times, per
    level l, (p_{2l}+p_{2l+1}+p_{2l+2}-1)! / ((p_{2l}-1)! p_{2l+1}! p_{2l+2}!),
    where the top level counts as p_0 = 1 and p_{2r+2} = 0.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    system = QSystem.from_path(MotzkinPath.zero(r))
    ys = weights_from_seed(system).y
    total = LaurentPoly.zero()
    for p in _compositions(n, 2 * r + 1):
        ext = (1,) + p + (0,)
        coeff = 1
        for level in range(r + 1):
            prev, a, b = ext[2 * level], ext[2 * level + 1], ext[2 * level + 2]
            coeff *= multinomial(prev + a + b - 1, a, b)
            if not coeff:
                break
        if not coeff:
            continue
        term = LaurentPoly.constant(coeff)
        for y, e in zip(ys, p):
            if e:
                term = term * y ** e
        total = total + term
    return total * system.R(1, 1)
