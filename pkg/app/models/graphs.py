"""
Weighted path models for the Q-system

Graphs Gamma_m on the spine 0 < 1 < 2 < 2' < 3 < ... , their transfer
matrices and resolvents, continued fractions with the two rearrangement
rules, the mutation map on weights, rerooting, LGV determinants and
exhaustive path enumeration.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import sympy

from app import config

from .errors import CaseMismatch, NonExactWeight, NotDivisible, NotMonomial, NotNilpotent
from .laurent import Coefficient, LaurentPoly, LaurentRatio, VarId, ring_zero, substitute_ratio
from .linalg import bareiss_det
from .qsystem import (
    MotzkinPath,
    QSystem,
    WeightSystem,
    abstract_weights,
    hard_particle_partition,
    weights_from_seed,
)
from .series import TSeries, series_det

logger = logging.getLogger(__name__)

# (index, primed); tuple order is the canonical order 0 < 1 < 2 < 2' < 3 ...
Vertex = Tuple[int, bool]
ROOT: Vertex = (0, False)

Weights = Union[WeightSystem, Sequence[Coefficient]]


def vertex_label(v: Vertex) -> str:
    return f"{v[0]}'" if v[1] else str(v[0])


def parse_vertex(label: str) -> Vertex:
    label = label.strip()
    if label.endswith("'"):
        return (int(label[:-1]), True)
    return (int(label), False)


def _ys(weights: Weights) -> Tuple[Coefficient, ...]:
    """Weights as a 0-indexed tuple (entry 0 is y_1)"""
    if isinstance(weights, WeightSystem):
        return weights.y
    return tuple(weights)


def _weight_text(w: Coefficient) -> str:
    return str(w)


@dataclass(frozen=True)
class Edge:
    source: Vertex
    target: Vertex
    t_degree: int
    weight: Coefficient
    label: Optional[int] = None


class TransferMatrix:
    """
    Sparse matrix over {0, 1}-degree polynomials in t

    Entry (row, col) is the weight of the edge col -> row.
    """

    def __init__(self, size: int, labels: Optional[Sequence[str]] = None):
        self.size = size
        self.labels = list(labels) if labels is not None else [str(i) for i in range(size)]
        self.entries: Dict[Tuple[int, int], Dict[int, Coefficient]] = {}

    def add(self, row: int, col: int, degree: int, weight: Coefficient):
        if degree not in (0, 1):
            raise ValueError(f"t-degree must be 0 or 1, got {degree}")
        cell = self.entries.setdefault((row, col), {})
        cell[degree] = cell[degree] + weight if degree in cell else weight

    def get(self, row: int, col: int, degree: int) -> Coefficient:
        return self.entries.get((row, col), {}).get(degree, LaurentPoly.zero())

    def part(self, degree: int) -> Dict[Tuple[int, int], Coefficient]:
        return {
            key: cell[degree]
            for key, cell in self.entries.items()
            if degree in cell and cell[degree]
        }

    def dense(self, degree: int) -> List[List[Coefficient]]:
        out = [[LaurentPoly.zero() for _ in range(self.size)] for _ in range(self.size)]
        for (i, j), w in self.part(degree).items():
            out[i][j] = w
        return out

    def t0_adjacency(self) -> np.ndarray:
        adjacency = np.zeros((self.size, self.size), dtype=bool)
        for i, j in self.part(0):
            adjacency[i, j] = True
        return adjacency

    def is_nilpotent(self) -> bool:
        adjacency = self.t0_adjacency().astype(np.int64)
        power = adjacency.copy()
        for _ in range(self.size):
            if not power.any():
                return True
            power = (power @ adjacency > 0).astype(np.int64)
        return not power.any()


class WeightedDigraph:
    """Vertices in canonical order plus oriented edges of t-degree 0 or 1"""

    def __init__(self, vertices: Sequence[Vertex], root: Vertex = ROOT, name: str = ""):
        self.vertices: List[Vertex] = sorted(set(vertices))
        self._index = {v: i for i, v in enumerate(self.vertices)}
        if root not in self._index:
            raise ValueError(f"Root {vertex_label(root)} is not a vertex")
        self.root = root
        self.name = name
        self.layout: Optional["GammaLayout"] = None
        self._edges: Dict[Tuple[Vertex, Vertex], Edge] = {}

    def index(self, v: Vertex) -> int:
        return self._index[v]

    def add_edge(self, source: Vertex, target: Vertex, t_degree: int, weight: Coefficient, label: Optional[int] = None):
        if source not in self._index or target not in self._index:
            raise ValueError(f"Edge {vertex_label(source)}->{vertex_label(target)} leaves the vertex set")
        if t_degree == 0 and self._index[target] <= self._index[source]:
            raise ValueError(f"t^0 edge {vertex_label(source)}->{vertex_label(target)} does not go up")
        if not weight:
            raise ValueError(f"Edge {vertex_label(source)}->{vertex_label(target)} has zero weight")
        if (source, target) in self._edges:
            raise ValueError(f"Duplicate edge {vertex_label(source)}->{vertex_label(target)}")
        self._edges[(source, target)] = Edge(source, target, t_degree, weight, label)

    @property
    def edges(self) -> List[Edge]:
        return [self._edges[k] for k in sorted(self._edges)]

    def edge(self, source: Vertex, target: Vertex) -> Optional[Edge]:
        return self._edges.get((source, target))

    def out_edges(self, v: Vertex) -> List[Edge]:
        return [e for e in self.edges if e.source == v]

    def transfer_matrix(self) -> TransferMatrix:
        tm = TransferMatrix(len(self.vertices), [vertex_label(v) for v in self.vertices])
        for e in self.edges:
            tm.add(self._index[e.target], self._index[e.source], e.t_degree, e.weight)
        return tm

    def same_as(self, other: "WeightedDigraph") -> bool:
        """Equal vertex sets and equal edges (degree and weight)"""
        if self.vertices != other.vertices or set(self._edges) != set(other._edges):
            return False
        for key, e in self._edges.items():
            f = other._edges[key]
            if e.t_degree != f.t_degree or e.weight != f.weight:
                return False
        return True

    def to_dot(self) -> str:
        name = self.name or "graph"
        lines = [f'digraph "{name}" {{', "  rankdir=BT;"]
        for v in self.vertices:
            shape = ', shape="doublecircle"' if v == self.root else ""
            lines.append(f'  "{vertex_label(v)}" [label="{vertex_label(v)}"{shape}];')
        for e in self.edges:
            text = f"t^{e.t_degree} * {_weight_text(e.weight)}"
            if e.label is not None:
                text = f"[{e.label}] {text}"
            lines.append(f'  "{vertex_label(e.source)}" -> "{vertex_label(e.target)}" [label="{text}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def __repr__(self) -> str:
        return f"WeightedDigraph({self.name!r}, {len(self.vertices)} vertices, {len(self._edges)} edges)"


# -- resolvents ------------------------------------------------------------


def _apply(matrix: Mapping[Tuple[int, int], Coefficient], vector: List[Coefficient]) -> List[Coefficient]:
    out = [LaurentPoly.zero() for _ in vector]
    for (i, j), w in matrix.items():
        if vector[j]:
            out[i] = out[i] + w * vector[j]
    return out


def _neumann(u: Mapping[Tuple[int, int], Coefficient], vector: List[Coefficient], size: int) -> List[Coefficient]:
    """(I - U)^{-1} v for nilpotent U"""
    result = list(vector)
    term = vector
    for _ in range(size):
        term = _apply(u, term)
        if not any(term):
            break
        result = [a + b for a, b in zip(result, term)]
    return result


def resolvent_columns(tm: TransferMatrix, j: int, order: int) -> List[List[Coefficient]]:
    """
    Column j of (I - T)^{-1}, coefficient by coefficient

    With T = U + tD: X_0 = (I-U)^{-1} e_j, X_n = (I-U)^{-1} D X_{n-1}.
    """
    if not tm.is_nilpotent():
        raise NotNilpotent("The t^0 part of the transfer matrix has a cycle")
    u, d = tm.part(0), tm.part(1)
    unit = [LaurentPoly.one() if i == j else LaurentPoly.zero() for i in range(tm.size)]
    columns = [_neumann(u, unit, tm.size)]
    for _ in range(order):
        columns.append(_neumann(u, _apply(d, columns[-1]), tm.size))
    return columns


def resolvent_series(tm: TransferMatrix, i: int, j: int, order: int) -> TSeries:
    """((I - T)^{-1})_{i,j} up to t^order"""
    return TSeries([col[i] for col in resolvent_columns(tm, j, order)], order)


def path_series(graph: WeightedDigraph, start: Vertex, end: Vertex, order: int) -> TSeries:
    """Generating function of weighted walks start -> end, t counting down steps"""
    return resolvent_series(graph.transfer_matrix(), graph.index(end), graph.index(start), order)


# -- Motzkin paths and Gamma_m ---------------------------------------------


def fundamental_domain(r: int) -> List[MotzkinPath]:
    """All Motzkin paths of length r with minimum 0, sorted"""
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    paths = set()
    for steps in itertools.product((-1, 0, 1), repeat=r - 1):
        m = [0]
        for s in steps:
            m.append(m[-1] + s)
        low = min(m)
        paths.add(tuple(v - low for v in m))
    return [MotzkinPath(p) for p in sorted(paths)]


def descending_segments(m: MotzkinPath) -> List[List[int]]:
    """Maximal runs alpha, alpha+1, ... with m_{alpha+1} = m_alpha - 1"""
    segments = [[1]]
    for a in range(2, m.rank + 1):
        if m[a] == m[a - 1] - 1:
            segments[-1].append(a)
        else:
            segments.append([a])
    return segments


@dataclass
class GammaLayout:
    """Skeleton of Gamma_m: labelled edges (lower, upper) and extra down edges (a, b)"""

    path: MotzkinPath
    skeleton: Dict[int, Tuple[Vertex, Vertex]] = field(default_factory=dict)
    extra: List[Tuple[int, int]] = field(default_factory=list)

    @property
    def vertices(self) -> List[Vertex]:
        return sorted({v for pair in self.skeleton.values() for v in pair})

    def label_of(self, lower: Vertex, upper: Vertex) -> Optional[int]:
        for label, pair in self.skeleton.items():
            if pair == (lower, upper):
                return label
        return None


def gamma_layout(m: MotzkinPath) -> GammaLayout:
    """
    Glue one G~_k per descending segment of length k

    Consecutive segments are glued according to the step between them:
    a flat step shifts by k and turns the top of the lower piece into the
    leaf (offset+k+1)'; an ascending step shifts by k+1.
    """
    segments = descending_segments(m)
    pairs = set()
    extra = []
    offset = 0
    for idx, seg in enumerate(segments):
        k = len(seg)
        flat_next = idx + 1 < len(segments) and m[segments[idx + 1][0]] == m[seg[-1]]
        top = k + 2
        for j in range(top):
            lower = (offset + j, False)
            if j + 1 == top and flat_next:
                upper = (offset + k + 1, True)
            else:
                upper = (offset + j + 1, False)
            pairs.add((lower, upper))
        for j in range(2, k + 1):
            pairs.add(((offset + j, False), (offset + j, True)))
        for a in range(3, k + 2):
            for b in range(1, a - 1):
                extra.append((offset + a, offset + b))
        offset += k if flat_next else k + 1

    ordered = sorted(pairs, key=lambda p: (p[0], 0 if p[1][1] else 1))
    if len(ordered) != 2 * m.rank + 1:
        raise AssertionError(f"Gamma_{m} has {len(ordered)} skeleton edges, expected {2 * m.rank + 1}")
    layout = GammaLayout(m, {label: pair for label, pair in enumerate(ordered, start=1)}, sorted(extra))
    logger.debug("Gamma_%s: %d vertices, extra edges %s", m, len(layout.vertices), layout.extra)
    return layout


def _divide(num: Coefficient, den: Coefficient, error=NotMonomial, what: str = "weight") -> Coefficient:
    if isinstance(num, LaurentRatio) or isinstance(den, LaurentRatio):
        return LaurentRatio.coerce(num) / den
    try:
        return num.exact_div(den)
    except NotDivisible:
        raise error(f"{what} ({num}) / ({den}) is not a Laurent polynomial") from None


def extra_weight(m: Union[MotzkinPath, GammaLayout], a: int, b: int, weights: Weights) -> Coefficient:
    """
    y_{a,b} = prod_{b <= i < a} y(i -> i+1) / prod_{b < i < a} y(i -> i')

    The leaf product runs over the leaves present in Gamma_m.
    """
    layout = m if isinstance(m, GammaLayout) else gamma_layout(m)
    if a <= b + 1:
        raise ValueError(f"Extra edges need a > b + 1, got a={a}, b={b}")
    ys = _ys(weights)
    num: Coefficient = LaurentPoly.one()
    den: Coefficient = LaurentPoly.one()
    for i in range(b, a):
        label = layout.label_of((i, False), (i + 1, False))
        if label is None:
            raise ValueError(f"No spine edge {i}->{i + 1} in Gamma_{layout.path}")
        num = num * ys[label - 1]
    for i in range(b + 1, a):
        label = layout.label_of((i, False), (i, True))
        if label is not None:
            den = den * ys[label - 1]
    value = _divide(num, den, NotMonomial, f"y_{{{a},{b}}}")
    if isinstance(value, LaurentPoly) and all(isinstance(y, LaurentPoly) and y.is_monomial() for y in ys):
        if not value.is_monomial():
            raise NotMonomial(f"y_{{{a},{b}}} = {value} is not a monomial")
    return value


def build_gamma(m: MotzkinPath, weights: Optional[Weights] = None) -> WeightedDigraph:
    """
    Gamma_m with its skeleton weights

    Down edges carry t * y_label, up edges 1; extra edges a -> b carry
    t * y_{a,b}.
    """
    weights = weights if weights is not None else abstract_weights(m.rank)
    ys = _ys(weights)
    layout = gamma_layout(m)
    graph = WeightedDigraph(layout.vertices, ROOT, name=f"Gamma_{m}")
    graph.layout = layout
    for label, (lower, upper) in layout.skeleton.items():
        graph.add_edge(lower, upper, 0, LaurentPoly.one(), label)
        graph.add_edge(upper, lower, 1, ys[label - 1], label)
    for a, b in layout.extra:
        graph.add_edge((a, False), (b, False), 1, extra_weight(layout, a, b, ys))
    return graph


def build_g_tilde(r: int, weights: Optional[Weights] = None) -> WeightedDigraph:
    """G~_r; r = 0 is the chain 0 <-> 1"""
    if r >= 1:
        graph = build_gamma(MotzkinPath.zero(r), weights)
        graph.name = f"G~_{r}"
        return graph
    ys = _ys(weights if weights is not None else abstract_weights(0))
    graph = WeightedDigraph([ROOT, (1, False)], ROOT, name="G~_0")
    graph.add_edge(ROOT, (1, False), 0, LaurentPoly.one(), 1)
    graph.add_edge((1, False), ROOT, 1, ys[0], 1)
    return graph


def _identity_minus(tm: TransferMatrix, order: int, skip: Optional[int] = None, negate_t: bool = False) -> List[List[TSeries]]:
    """I - T(t) (or I - T(-t)) as a matrix of series, without row and column skip"""
    keep = [i for i in range(tm.size) if i != skip]
    sign = 1 if negate_t else -1
    return [
        [TSeries([(1 if i == j else 0) - tm.get(i, j, 0), tm.get(i, j, 1) * sign], order) for j in keep]
        for i in keep
    ]


def hard_particle_det(r: int, weights: Weights) -> TSeries:
    """det(I - T_r(-t y)) as a polynomial in t"""
    tm = build_g_tilde(r, weights).transfer_matrix()
    return series_det(_identity_minus(tm, r + 1, negate_t=True))


def resolvent_fraction(graph: WeightedDigraph) -> Tuple[TSeries, TSeries]:
    """
    Root-to-root resolvent as a quotient of polynomials in t

    The denominator is det(I - T), the numerator the minor without the
    root; both have constant term 1.
    """
    tm = graph.transfer_matrix()
    if not tm.is_nilpotent():
        raise NotNilpotent("The t^0 part of the transfer matrix has a cycle")
    root = graph.index(graph.root)
    order = tm.size
    denominator = series_det(_identity_minus(tm, order))
    numerator = series_det(_identity_minus(tm, order, skip=root)) if tm.size > 1 else TSeries.one(order)
    return numerator, denominator


def heap_series(r: int, weights: Weights, order: int) -> TSeries:
    """Z^{G_r}(0, -t y_2, ...) / Z^{G_r}(-t y_1, -t y_2, ...)"""
    ys = _ys(weights)
    negated = [-y for y in ys]
    numerator = hard_particle_partition(r, [ring_zero(ys[0])] + negated[1:])
    denominator = hard_particle_partition(r, negated)
    return TSeries(numerator, order) / TSeries(denominator, order)


# -- continued fractions ---------------------------------------------------


@dataclass(frozen=True)
class ContinuedFraction:
    """
    J-fraction V_k = 1 / (1 - t c_k - t d_k V_{k+1})

    levels[k] = (c_k, d_k); the last level has d = None. With a lead l the
    value is 1 + t l V_0.
    """

    levels: Tuple[Tuple[Coefficient, Optional[Coefficient]], ...]
    lead: Optional[Coefficient] = None

    def __post_init__(self):
        if not self.levels or self.levels[-1][1] is not None:
            raise ValueError("The last level must be terminal (d = None)")
        if any(d is None for _, d in self.levels[:-1]):
            raise ValueError("Only the last level may be terminal")

    @property
    def depth(self) -> int:
        return len(self.levels)


def continued_fraction(r: Union[int, MotzkinPath], weights: Weights) -> ContinuedFraction:
    """
    Levels (0,y1), (0,y2), (y3,y4), ..., (y_{2r-1},y_{2r}), (y_{2r+1},None) of G~_r

    For a path m that is not flat the graph Gamma_m has extra edges and no
    level-per-weight form; its root resolvent is expanded with
    stieltjes_fraction instead.
    """
    if isinstance(r, MotzkinPath):
        if any(r):
            return stieltjes_fraction(*resolvent_fraction(build_gamma(r, weights)))
        r = r.rank
    ys = _ys(weights)
    zero = ring_zero(ys[0])
    if r == 0:
        return ContinuedFraction(((zero, ys[0]), (zero, None)))
    levels = [(zero, ys[0]), (zero, ys[1])]
    for k in range(2, r + 1):
        levels.append((ys[2 * k - 2], ys[2 * k - 1]))
    levels.append((ys[2 * r], None))
    return ContinuedFraction(tuple(levels))


def compact_continued_fraction(weights: Weights) -> ContinuedFraction:
    """Levels (y1,y2), (y3,y4), ..., (y_{2r+1},None): the resolvent of G~'_r at (1,1)"""
    ys = _ys(weights)
    r = (len(ys) - 1) // 2
    levels = [(ys[2 * k], ys[2 * k + 1]) for k in range(r)]
    levels.append((ys[2 * r], None))
    return ContinuedFraction(tuple(levels))


def _trimmed(coeffs) -> list:
    out = list(coeffs)
    while out and out[-1] == 0:
        out.pop()
    return out


def _at(coeffs: Sequence, i: int):
    return coeffs[i] if i < len(coeffs) else sympy.Integer(0)


def stieltjes_fraction(numerator: TSeries, denominator: TSeries) -> ContinuedFraction:
    """
    Levels (0,d_0), (0,d_1), ..., (d,None) with eval_cf equal to numerator / denominator

    Both arguments are polynomials in t with constant term 1. For V = p/q,
    (1 - 1/V)/t = (p - q)/(t p) is d_0 V' with V' = p'/q' of the same kind;
    the expansion stops when that quotient is a constant. Coefficients are
    cancelled with sympy and returned as LaurentRatio.
    """
    p = _trimmed(c.to_sympy() for c in numerator)
    q = _trimmed(c.to_sympy() for c in denominator)
    if _at(p, 0) != 1 or _at(q, 0) != 1:
        raise ValueError("Numerator and denominator need constant term 1")
    levels: List[Tuple[Coefficient, Optional[Coefficient]]] = []
    for _ in range(2 * (max(len(p), len(q)) + 1)):
        width = max(len(p), len(q))
        a = _trimmed(sympy.cancel(_at(p, i + 1) - _at(q, i + 1)) for i in range(width - 1))
        d = _at(a, 0)
        if all(sympy.cancel(_at(a, i) - d * _at(p, i)) == 0 for i in range(max(len(a), len(p)))):
            levels.append((LaurentRatio.from_sympy(d), None))
            logger.debug("Stieltjes expansion with %d levels", len(levels))
            return ContinuedFraction(tuple(levels))
        if d == 0:
            raise ValueError(f"Stieltjes expansion breaks down at level {len(levels)}")
        levels.append((LaurentRatio.zero(), LaurentRatio.from_sympy(d)))
        p, q = _trimmed(sympy.cancel(x / d) for x in a), p
    raise AssertionError("Stieltjes expansion did not terminate")


def eval_cf(cf: ContinuedFraction, order: int) -> TSeries:
    value: Optional[TSeries] = None
    for c, d in reversed(cf.levels):
        denominator = TSeries([1, -c], order)
        if d is not None:
            denominator = denominator - value.scale(d).shift(1)
        value = denominator.inverse()
    if cf.lead is not None:
        value = TSeries.one(order) + value.scale(cf.lead).shift(1)
    return value


def rearrange_R1(cf: ContinuedFraction) -> ContinuedFraction:
    """1/(1 - a/(1 - b)) = 1 + a/(1 - a - b) applied at the top level"""
    if cf.lead is not None:
        raise ValueError("R1 applies to a fraction without lead")
    if len(cf.levels) < 2:
        raise ValueError("R1 needs at least two levels")
    c0, d0 = cf.levels[0]
    if c0:
        raise ValueError("R1 needs c_0 = 0")
    c1, d1 = cf.levels[1]
    return ContinuedFraction(((d0 + c1, d1),) + cf.levels[2:], lead=d0)


def r2_weights(a: Coefficient, b: Coefficient, c: Coefficient) -> Tuple[Coefficient, Coefficient, Coefficient]:
    """a + b/(1-c) = a'/(1 - b'/(1-c')) with a' = a+b, b' = bc/(a+b), c' = ac/(a+b)"""
    s = a + b
    return s, _divide(b * c, s, NonExactWeight, "b'"), _divide(a * c, s, NonExactWeight, "c'")


def rearrange_R2(cf: ContinuedFraction, k: int) -> ContinuedFraction:
    """
    Rewrite the last two levels k, k+1 as three levels

    Interior levels are refused: the identity needs V_{k+1} = 1/(1 - t c_{k+1}).
    """
    if k + 1 != len(cf.levels) - 1:
        raise ValueError(f"R2 applies to the last two levels, got k={k} of depth {cf.depth}")
    c_k, d_k = cf.levels[k]
    c_next, _ = cf.levels[k + 1]
    s, b_new, c_new = r2_weights(c_k, d_k, c_next)
    zero = ring_zero(s)
    new_levels = cf.levels[:k] + ((zero, s), (zero, b_new), (c_new, None))
    return ContinuedFraction(new_levels, cf.lead)


# -- mutations and rerooting -----------------------------------------------


def mutation_case(m: MotzkinPath, alpha: int) -> str:
    """'i' or 'ii' for the forward mutation m -> m + e_alpha; CaseMismatch otherwise"""
    r = m.rank
    if not 1 <= alpha <= r:
        raise CaseMismatch(f"alpha={alpha} outside 1..{r}")
    if alpha > 1 and m[alpha - 1] != m[alpha]:
        raise CaseMismatch(f"m_{alpha - 1} != m_{alpha} in {m}")
    if alpha < r and m[alpha + 1] == m[alpha]:
        return "ii"
    if alpha < r and m[alpha + 1] != m[alpha] + 1:
        raise CaseMismatch(f"m_{alpha + 1} must be m_{alpha} or m_{alpha} + 1 in {m}")
    return "i"


def admissible_mutations(m: MotzkinPath) -> List[int]:
    out = []
    for alpha in range(1, m.rank + 1):
        try:
            mutation_case(m, alpha)
        except CaseMismatch:
            continue
        out.append(alpha)
    return out


def mutate_weights(m: MotzkinPath, alpha: int, weights: Weights) -> WeightSystem:
    """
    Weights of Gamma_{m + e_alpha} from those of Gamma_m

    Case (i) m_{a-1} = m_a < m_{a+1}; case (ii) m_{a-1} = m_a = m_{a+1},
    which also rescales y_{2a+2}. At alpha = 1 the left condition is
    dropped and at alpha = r case (i) applies.

    Only weights are mapped. At alpha = 1 the root series of the two graphs
    differ by the R1 then R2 rerooting, which is left to the caller.
    """
    case_ii = mutation_case(m, alpha) == "ii"
    ys = list(_ys(weights))
    odd, even, nxt = ys[2 * alpha - 2], ys[2 * alpha - 1], ys[2 * alpha]
    s = LaurentRatio.coerce(odd + even)
    ys[2 * alpha - 2] = odd + even
    ys[2 * alpha - 1] = LaurentRatio.coerce(even * nxt) / s
    ys[2 * alpha] = LaurentRatio.coerce(odd * nxt) / s
    if case_ii:
        ys[2 * alpha + 1] = LaurentRatio.coerce(ys[2 * alpha + 1] * odd) / s
    new_path = m.bumped(alpha, 1)
    logger.debug("Mutated weights %s -> %s at alpha=%d (case %s)", m, new_path, alpha, "ii" if case_ii else "i")
    return WeightSystem(m.rank, tuple(ys), new_path)


def _substitute(value: Coefficient, bindings: Mapping[VarId, Coefficient]) -> LaurentRatio:
    if isinstance(value, LaurentRatio):
        return substitute_ratio(value.num, bindings) / substitute_ratio(value.den, bindings)
    return substitute_ratio(value, bindings)


def check_mutation(m: MotzkinPath, alpha: int) -> bool:
    """mutate_weights(m) agrees with weights_from_seed(m + e_alpha) after changing seed"""
    before = QSystem.from_path(m)
    after = QSystem.from_path(m.bumped(alpha, 1))
    mutated = mutate_weights(m, alpha, weights_from_seed(before))
    expected = weights_from_seed(after)
    m_a = m[alpha]
    bindings = {before.seed.variables[(alpha, m_a)]: after.R(alpha, m_a)}
    for i, (got, want) in enumerate(zip(mutated.y, expected.y), start=1):
        if _substitute(got, bindings) != LaurentRatio.coerce(want):
            logger.debug("y_%d differs after mutating %s at alpha=%d", i, m, alpha)
            return False
    return True


def rerooted_series(system: QSystem, order: int) -> TSeries:
    """
    sum_n t^n R_{1,n} in the seed x_m via paths on Gamma_m

        sum_{i < m_1} t^i R_{1,i} + t^{m_1} R_{1,m_1} Z_m(t)
    """
    m1 = system.path[1]
    graph = build_gamma(system.path, weights_from_seed(system))
    z = path_series(graph, ROOT, ROOT, max(order - m1, 0))
    coeffs = [system.R(1, i) for i in range(min(m1, order + 1))]
    for n in range(order + 1 - len(coeffs)):
        coeffs.append(system.R(1, m1) * z[n])
    return TSeries(coeffs, order)


def lgv_R(system: QSystem, alpha: int, n: int) -> LaurentPoly:
    """
    det(Z(n+i+j-alpha-1)) * R_{1,m_1}^alpha, which equals R_{alpha,n+m_1}

    Z(k) is the root-to-root walk partition function of Gamma_m with k
    down steps. Requires n >= alpha - 1.
    """
    if n < alpha - 1:
        raise ValueError(f"lgv_R needs n >= alpha - 1, got n={n}, alpha={alpha}")
    graph = build_gamma(system.path, weights_from_seed(system))
    z = path_series(graph, ROOT, ROOT, n + alpha - 1)
    matrix = [[z[n + i + j - alpha - 1] for j in range(1, alpha + 1)] for i in range(1, alpha + 1)]
    return bareiss_det(matrix) * system.R(1, system.path[1]) ** alpha


# -- path enumeration ------------------------------------------------------


@dataclass(frozen=True)
class Walk:
    vertices: Tuple[Vertex, ...]
    weight: Coefficient

    @property
    def steps(self) -> List[Tuple[Vertex, Vertex]]:
        return list(zip(self.vertices, self.vertices[1:]))


def enumerate_paths(graph: WeightedDigraph, start: Vertex, end: Vertex, n_down: int) -> List[Walk]:
    """
    Every walk start -> end with exactly n_down steps of t-degree 1

    Depth-first; t^0 edges go strictly up, so each branch is finite.
    """
    if n_down > config.MAX_DOWN_STEPS or len(graph.vertices) > config.MAX_ENUM_VERTICES:
        raise ValueError(
            f"Enumeration limited to {config.MAX_DOWN_STEPS} down steps and "
            f"{config.MAX_ENUM_VERTICES} vertices"
        )
    adjacency: Dict[Vertex, List[Edge]] = {v: [] for v in graph.vertices}
    for e in graph.edges:
        adjacency[e.source].append(e)

    walks: List[Walk] = []

    def visit(v: Vertex, downs: int, trail: List[Vertex], weight: Coefficient):
        if v == end and downs == n_down:
            walks.append(Walk(tuple(trail), weight))
            return
        for e in adjacency[v]:
            if downs + e.t_degree > n_down:
                continue
            trail.append(e.target)
            visit(e.target, downs + e.t_degree, trail, weight * e.weight)
            trail.pop()

    visit(start, 0, [start], LaurentPoly.one())
    return walks


def step_displacement(source: Vertex, target: Vertex) -> int:
    """Time taken by one step on the lattice picture"""
    if target > source:
        return 0 if target[1] else 1
    if source[1]:
        return 2
    return 2 - (source[0] - target[0])


def lattice_points(walk: Walk, start_time: int) -> List[Tuple[int, Vertex]]:
    time = start_time
    points = [(time, walk.vertices[0])]
    for source, target in walk.steps:
        time += step_displacement(source, target)
        points.append((time, target))
    return points


def non_intersecting_families(
    graph: WeightedDigraph,
    starts: Sequence[int],
    ends: Sequence[int],
) -> List[Tuple[Walk, ...]]:
    """
    Families of root-to-root walks, walk i from time starts[i] to ends[i],
    sharing no lattice point (time, vertex)
    """
    candidates = []
    for s, e in zip(starts, ends):
        if (e - s) % 2 or e < s:
            raise ValueError(f"Cannot join time {s} to time {e}")
        walks = enumerate_paths(graph, graph.root, graph.root, (e - s) // 2)
        candidates.append([(w, set(lattice_points(w, s))) for w in walks])

    families = []
    for combo in itertools.product(*candidates):
        seen: set = set()
        disjoint = True
        for _, points in combo:
            if seen & points:
                disjoint = False
                break
            seen |= points
        if disjoint:
            families.append(tuple(w for w, _ in combo))
    return families


def lgv_families(graph: WeightedDigraph, alpha: int, n: int) -> List[Tuple[Walk, ...]]:
    """Nested families: walk i runs from time 2(alpha-i) to 2(n+i-1)"""
    starts = [2 * (alpha - i) for i in range(1, alpha + 1)]
    ends = [2 * (n + i - 1) for i in range(1, alpha + 1)]
    return non_intersecting_families(graph, starts, ends)


def family_weight(families: Sequence[Tuple[Walk, ...]]) -> Coefficient:
    total: Coefficient = LaurentPoly.zero()
    for family in families:
        term: Coefficient = LaurentPoly.one()
        for walk in family:
            term = term * walk.weight
        total = total + term
    return total
