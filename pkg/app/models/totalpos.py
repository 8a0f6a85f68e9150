"""
Factorization of the compact transfer matrices into elementary matrices

    I - T'_m = F^{-1} - t D E,   P_m = F D E,   P'_m = D E F = F^{-1} P_m F

F, D, E are products of f_i = I + E_{i+1,i}, d_i (mu_i = y_{2i-1} at (i,i))
and e_i = I + nu_i E_{i,i+1} (nu_i = y_{2i}/y_{2i-1}), ordered by the
sequences sigma_m and tau_m.
"""

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Mapping, Optional, Sequence, Tuple, Union

import sympy

from app import config

from .compact import ascending_segments, compact_graph
from .errors import DecompositionMismatch, DivisionByZero
from .graphs import TransferMatrix, Weights, _ys, descending_segments, resolvent_columns
from .laurent import SYMBOLS, Coefficient, LaurentPoly, LaurentRatio
from .linalg import Matrix, identity, matmul, matsub, unitriangular_inverse
from .qsystem import MotzkinPath, QSystem, abstract_weights, weights_from_seed
from .series import TSeries

logger = logging.getLogger(__name__)


def _reverse_blocks(r: int, segments: Sequence[Sequence[int]]) -> Tuple[int, ...]:
    seq = list(range(r, 0, -1))
    for seg in segments:
        if len(seg) < 2:
            continue
        positions = sorted(seq.index(v) for v in seg)
        lo, hi = positions[0], positions[-1]
        seq[lo:hi + 1] = reversed(seq[lo:hi + 1])
    return tuple(seq)


def sigma_tau(m: MotzkinPath) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """
    (r, r-1, ..., 1) with the values of every ascending run reversed (sigma)
    and of every descending run reversed (tau)
    """
    return _reverse_blocks(m.rank, ascending_segments(m)), _reverse_blocks(m.rank, descending_segments(m))


def _quotient(a: Coefficient, b: Coefficient) -> Coefficient:
    if isinstance(a, LaurentRatio) or isinstance(b, LaurentRatio):
        return LaurentRatio.coerce(a) / b
    return a.exact_div(b)


@dataclass(frozen=True)
class ElemFactorization:
    path: MotzkinPath
    sigma: Tuple[int, ...]
    tau: Tuple[int, ...]
    lam: Tuple[Coefficient, ...]
    mu: Tuple[Coefficient, ...]
    nu: Tuple[Coefficient, ...]

    @property
    def size(self) -> int:
        return self.path.rank + 1


def factorization(m: MotzkinPath, weights: Optional[Weights] = None) -> ElemFactorization:
    r = m.rank
    ys = _ys(weights if weights is not None else abstract_weights(r))
    sigma, tau = sigma_tau(m)
    lam = tuple(LaurentPoly.one() for _ in range(r))
    mu = tuple(ys[2 * i - 2] for i in range(1, r + 2))
    nu = tuple(_quotient(ys[2 * i - 1], ys[2 * i - 2]) for i in range(1, r + 1))
    return ElemFactorization(m, sigma, tau, lam, mu, nu)


def elementary(kind: str, i: int, param: Union[Coefficient, int], size: int) -> Matrix:
    """f_i, d_i or e_i as a size x size matrix (1-indexed i)"""
    out = identity(size)
    param = param if isinstance(param, (LaurentPoly, LaurentRatio)) else LaurentPoly.coerce(param)
    if kind == "f":
        if not 1 <= i < size:
            raise IndexError(f"f_{i} outside 1..{size - 1}")
        out[i][i - 1] = param
    elif kind == "e":
        if not 1 <= i < size:
            raise IndexError(f"e_{i} outside 1..{size - 1}")
        out[i - 1][i] = param
    elif kind == "d":
        if not 1 <= i <= size:
            raise IndexError(f"d_{i} outside 1..{size}")
        out[i - 1][i - 1] = param
    else:
        raise ValueError(f"Unknown elementary matrix kind {kind!r}")
    return out


def _product(factors: Sequence[Matrix], size: int) -> Matrix:
    out = identity(size)
    for f in factors:
        out = matmul(out, f)
    return out


def factor_F(m: MotzkinPath, fac: Optional[ElemFactorization] = None) -> Matrix:
    fac = fac or factorization(m)
    return _product([elementary("f", i, fac.lam[i - 1], fac.size) for i in fac.sigma], fac.size)


def factor_D(m: MotzkinPath, fac: Optional[ElemFactorization] = None) -> Matrix:
    fac = fac or factorization(m)
    return _product([elementary("d", i, fac.mu[i - 1], fac.size) for i in range(1, fac.size + 1)], fac.size)


def factor_E(m: MotzkinPath, fac: Optional[ElemFactorization] = None) -> Matrix:
    fac = fac or factorization(m)
    return _product([elementary("e", i, fac.nu[i - 1], fac.size) for i in fac.tau], fac.size)


def build_N_B(m: MotzkinPath, weights: Optional[Weights] = None, check: bool = True) -> Tuple[Matrix, Matrix]:
    """
    (N_m, B_m) with N_m = I - F^{-1} and B_m = D E (the coefficient of t)

    With check=True the pair is compared against the transfer matrix of
    the compactified Gamma_m.
    """
    weights = weights if weights is not None else abstract_weights(m.rank)
    fac = factorization(m, weights)
    n = matsub(identity(fac.size), unitriangular_inverse(factor_F(m, fac)))
    b = matmul(factor_D(m, fac), factor_E(m, fac))
    if check:
        tm = compact_graph(m, weights).transfer_matrix()
        for degree, expected in ((0, n), (1, b)):
            actual = tm.dense(degree)
            for i, j in itertools.product(range(fac.size), repeat=2):
                if actual[i][j] != expected[i][j]:
                    raise DecompositionMismatch(
                        f"T'_{m} entry ({i + 1},{j + 1}) at t^{degree}: {actual[i][j]} != {expected[i][j]}"
                    )
    return n, b


def transfer_from_parts(n: Matrix, b: Matrix) -> TransferMatrix:
    """N + t B as a TransferMatrix"""
    tm = TransferMatrix(len(n))
    for i, j in itertools.product(range(len(n)), repeat=2):
        if n[i][j]:
            tm.add(i, j, 0, n[i][j])
        if b[i][j]:
            tm.add(i, j, 1, b[i][j])
    return tm


def build_P(m: MotzkinPath, weights: Optional[Weights] = None) -> Matrix:
    fac = factorization(m, weights)
    return matmul(matmul(factor_F(m, fac), factor_D(m, fac)), factor_E(m, fac))


def build_P_prime(m: MotzkinPath, weights: Optional[Weights] = None) -> Matrix:
    fac = factorization(m, weights)
    return matmul(matmul(factor_D(m, fac), factor_E(m, fac)), factor_F(m, fac))


def check_conjugacy(m: MotzkinPath, weights: Optional[Weights] = None) -> bool:
    """P'_m == F^{-1} P_m F"""
    fac = factorization(m, weights)
    f = factor_F(m, fac)
    conjugated = matmul(matmul(unitriangular_inverse(f), build_P(m, weights)), f)
    return conjugated == build_P_prime(m, weights)


def check_master_identity(m: MotzkinPath, weights: Optional[Weights] = None) -> bool:
    """F (I - T'_m) == I - t P_m, degree by degree"""
    n, b = build_N_B(m, weights)
    f = factor_F(m, factorization(m, weights))
    size = len(f)
    constant = matmul(f, matsub(identity(size), n))
    linear = matmul(f, b)
    return constant == identity(size) and linear == build_P(m, weights)


def _power_columns(p: Matrix, start: List[Coefficient], order: int) -> List[List[Coefficient]]:
    """start, P start, P^2 start, ..."""
    columns = [start]
    for _ in range(order):
        prev = columns[-1]
        columns.append([
            sum((p[i][k] * prev[k] for k in range(len(prev)) if p[i][k] and prev[k]), LaurentPoly.zero())
            for i in range(len(p))
        ])
    return columns


def network_resolvent(p: Matrix, f: Matrix, i: int, j: int, order: int) -> TSeries:
    """((I - tP)^{-1} F)_{i,j} (0-indexed)"""
    column = [f[a][j] for a in range(len(f))]
    return TSeries([col[i] for col in _power_columns(p, column, order)], order)


def theorem_columns(m: MotzkinPath) -> List[Tuple[int, int]]:
    """Columns a of (I - tP_m)^{-1} entering the (1,1) resolvent, with multiplicity F_{a,1}"""
    f = factor_F(m)
    return [(a + 1, f[a][0].constant_term()) for a in range(len(f)) if f[a][0]]


def first_ascending_endpoints(m: MotzkinPath) -> Optional[Tuple[int, int]]:
    """First and last node of the first ascending run of length >= 2"""
    for seg in ascending_segments(m):
        if len(seg) >= 2:
            return seg[0], seg[-1]
    return None


def branch_columns(m: MotzkinPath) -> Tuple[int, ...]:
    """
    Columns summed by the run-based form of the (1,1) resolvent: 1 and 2,
    or a1..a2+1 when the first ascending run a1..a2 starts at node 1
    """
    size = m.rank + 1
    ends = first_ascending_endpoints(m)
    if ends is None or ends[0] > 1:
        return tuple(a for a in (1, 2) if a <= size)
    return tuple(range(ends[0], min(ends[1] + 1, size) + 1))


def _first_row(p: Matrix, columns: Sequence[Tuple[int, int]], order: int) -> List[Coefficient]:
    """sum_a k_a ((I - tP)^{-1})_{1,a} for (a, k_a) in columns"""
    size = len(p)
    total = [LaurentPoly.zero() for _ in range(order + 1)]
    for a, k in columns:
        unit = [LaurentPoly.one() if i == a - 1 else LaurentPoly.zero() for i in range(size)]
        for n, col in enumerate(_power_columns(p, unit, order)):
            total[n] = total[n] + col[0] * k
    return total


@dataclass(frozen=True)
class ResolventReport:
    """Outcome of comparing the compact (1,1) resolvent with the network side"""

    path: MotzkinPath
    holds: bool
    columns: Tuple[Tuple[int, int], ...]
    branch: Tuple[int, ...]
    branch_agrees: bool


def resolvent_report(m: MotzkinPath, order: int = config.DEFAULT_ORDER, weights: Optional[Weights] = None) -> ResolventReport:
    """
    holds: (I - T'_m)^{-1} == (I - tP_m)^{-1} F column by column up to
    t^order, ((I - tP'_m)^{-1})_{1,1} is the same (1,1) series, and so is
    the F-column sum over theorem_columns(m).
    branch_agrees: the plain sum over branch_columns(m) gives it too.
    """
    weights = weights if weights is not None else abstract_weights(m.rank)
    fac = factorization(m, weights)
    f = factor_F(m, fac)
    p = build_P(m, weights)
    tm = compact_graph(m, weights).transfer_matrix()
    columns = tuple(theorem_columns(m))
    branch = branch_columns(m)

    holds = True
    for j in range(fac.size):
        lhs = resolvent_columns(tm, j, order)
        rhs = _power_columns(p, [f[a][j] for a in range(fac.size)], order)
        if any(x != y for n in range(order + 1) for x, y in zip(lhs[n], rhs[n])):
            logger.debug("Master identity fails for m=%s, column %d", m, j + 1)
            holds = False
            break

    lhs11 = [col[0] for col in resolvent_columns(tm, 0, order)]
    unit = [LaurentPoly.one()] + [LaurentPoly.zero()] * (fac.size - 1)
    shifted = [col[0] for col in _power_columns(build_P_prime(m, weights), unit, order)]
    holds = holds and shifted == lhs11 and _first_row(p, columns, order) == lhs11
    branch_agrees = _first_row(p, [(a, 1) for a in branch], order) == lhs11

    report = ResolventReport(m, holds, columns, branch, branch_agrees)
    logger.debug(
        "Resolvent for m=%s: F-columns %s hold=%s, run branch %s agrees=%s",
        m, list(columns), holds, list(branch), branch_agrees,
    )
    return report


def verify_resolvent_theorem(m: MotzkinPath, order: int = config.DEFAULT_ORDER, weights: Optional[Weights] = None) -> bool:
    return resolvent_report(m, order, weights).holds


def evaluate_matrix(matrix: Matrix, point: Mapping[str, Union[Fraction, int]]) -> List[List[Fraction]]:
    """Evaluate every entry at a point given by variable name"""
    bound = {SYMBOLS.lookup(name): Fraction(value) for name, value in point.items() if name in SYMBOLS}
    out = []
    for row in matrix:
        values = []
        for entry in row:
            if isinstance(entry, LaurentRatio):
                den = entry.den.eval_rational(bound)
                if den == 0:
                    raise DivisionByZero(f"Denominator {entry.den} vanishes at {dict(point)}")
                values.append(entry.num.eval_rational(bound) / den)
            else:
                values.append(entry.eval_rational(bound))
        out.append(values)
    return out


def check_total_positivity(m: MotzkinPath, point: Mapping[str, Union[Fraction, int]], k_max: Optional[int] = None) -> bool:
    """
    Every minor of P_m (t = 1, seed weights of x_m evaluated at point) of
    size <= k_max is non-negative. A seed variable that is 0 at point and
    appears with a negative exponent raises DivisionByZero.
    """
    system = QSystem.from_path(m)
    p = evaluate_matrix(build_P(m, weights_from_seed(system)), point)
    size = len(p)
    k_max = size if k_max is None else min(k_max, size)
    matrix = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in p])
    for k in range(1, k_max + 1):
        for rows in itertools.combinations(range(size), k):
            for cols in itertools.combinations(range(size), k):
                minor = matrix.extract(list(rows), list(cols)).det()
                if minor < 0:
                    logger.debug("Negative minor rows=%s cols=%s of P_%s: %s", rows, cols, m, minor)
                    return False
    return True


def network_dot(m: MotzkinPath, weights: Optional[Weights] = None) -> str:
    """
    Planar network of F D E: rails 1..r+1 left to right, one column per
    elementary factor
    """
    fac = factorization(m, weights)
    size = fac.size
    elements = [("f", i) for i in fac.sigma] + [("d", i) for i in range(1, size + 1)] + [("e", i) for i in fac.tau]
    lines = [f'digraph "network_{m}" {{', "  rankdir=LR;", "  node [shape=point];"]
    for rail in range(1, size + 1):
        lines.append(f'  "src{rail}" [shape=plaintext, label="{rail}"];')
        lines.append(f'  "snk{rail}" [shape=plaintext, label="{rail}"];')

    def node(col: int, rail: int) -> str:
        if col == 0:
            return f"src{rail}"
        if col == len(elements):
            return f"snk{rail}"
        return f"c{col}_{rail}"

    for col, (kind, i) in enumerate(elements):
        for rail in range(1, size + 1):
            label = f"d{i}: {fac.mu[i - 1]}" if kind == "d" and rail == i else ""
            lines.append(f'  "{node(col, rail)}" -> "{node(col + 1, rail)}" [label="{label}"];')
        if kind == "f":
            lines.append(f'  "{node(col, i)}" -> "{node(col + 1, i + 1)}" [label="f{i}: {fac.lam[i - 1]}"];')
        elif kind == "e":
            lines.append(f'  "{node(col, i + 1)}" -> "{node(col + 1, i)}" [label="e{i}: {fac.nu[i - 1]}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
