"""
The A_r Q-system

    R_{a,n+1} R_{a,n-1} = R_{a,n}^2 + R_{a+1,n} R_{a-1,n},   R_{0,n} = R_{r+1,n} = 1

Seeds are indexed by Motzkin paths m: the seed x_m holds R_{a,m_a} and
R_{a,m_a+1} for a = 1..r. Every other R_{a,n} is a Laurent polynomial in the
seed and is reached by exact division.
"""

import itertools
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from app import config

from .errors import ConservationFailure, MotzkinViolation, NotDivisible, NotMonomial, SeedFileError
from .laurent import SYMBOLS, Coefficient, LaurentPoly, LaurentRatio, VariableRegistry, VarId, ring_one, ring_zero
from .linalg import bareiss_det

logger = logging.getLogger(__name__)

Index = Tuple[int, int]  # (alpha, n)


@dataclass(frozen=True)
class MotzkinPath:
    """Integer vector (m_1, ..., m_r) with |m_a - m_{a+1}| <= 1"""

    m: Tuple[int, ...]

    def __post_init__(self):
        m = tuple(int(v) for v in self.m)
        object.__setattr__(self, "m", m)
        if not m:
            raise MotzkinViolation("A Motzkin path needs at least one entry")
        for a, (u, v) in enumerate(zip(m, m[1:]), start=1):
            if abs(u - v) > 1:
                raise MotzkinViolation(f"|m_{a} - m_{a + 1}| = |{u} - {v}| > 1 in {m}")

    @classmethod
    def zero(cls, r: int) -> "MotzkinPath":
        return cls((0,) * r)

    @classmethod
    def from_text(cls, text: str) -> "MotzkinPath":
        """Parse '0,1,2' (spaces allowed)"""
        try:
            values = tuple(int(v) for v in text.replace(" ", "").split(","))
        except ValueError:
            raise MotzkinViolation(f"Cannot parse Motzkin path {text!r}") from None
        return cls(values)

    @property
    def rank(self) -> int:
        return len(self.m)

    def __getitem__(self, alpha: int) -> int:
        """m_alpha, 1-indexed"""
        if not 1 <= alpha <= len(self.m):
            raise IndexError(f"alpha={alpha} outside 1..{len(self.m)}")
        return self.m[alpha - 1]

    def __iter__(self):
        return iter(self.m)

    def is_fundamental(self) -> bool:
        return min(self.m) == 0

    def bumped(self, alpha: int, delta: int) -> "MotzkinPath":
        """m + delta * e_alpha (MotzkinViolation if the result is not a path)"""
        m = list(self.m)
        m[alpha - 1] += delta
        return MotzkinPath(tuple(m))

    def to_text(self) -> str:
        return ",".join(str(v) for v in self.m)

    def __str__(self) -> str:
        return f"({self.to_text()})"


def seed_var_name(alpha: int, n: int) -> str:
    # negative times cannot appear literally in a variable name
    time = str(n) if n >= 0 else f"m{-n}"
    return config.SEED_VAR_FORMAT.format(alpha=alpha, n=time)


class Seed:
    """
    The cluster x_m: 2r formal variables R_{a,n}, n in {m_a, m_a+1}

    The boundary rows a = 0 and a = r+1 are the constant 1 and are never
    stored.
    """

    def __init__(self, path: MotzkinPath, variables: Mapping[Index, VarId]):
        expected = {(a, n) for a in range(1, path.rank + 1) for n in (path[a], path[a] + 1)}
        if set(variables) != expected:
            raise SeedFileError(f"Seed variables {sorted(variables)} do not match path {path}")
        self.path = path
        self.variables: Dict[Index, VarId] = dict(variables)

    @classmethod
    def from_path(cls, path: MotzkinPath, registry: VariableRegistry = SYMBOLS) -> "Seed":
        variables = {
            (a, n): registry.intern(seed_var_name(a, n))
            for a in range(1, path.rank + 1)
            for n in (path[a], path[a] + 1)
        }
        return cls(path, variables)

    @property
    def rank(self) -> int:
        return self.path.rank

    def value(self, alpha: int, n: int) -> LaurentPoly:
        return LaurentPoly.variable(self.variables[(alpha, n)])

    def initial_values(self) -> Dict[Index, LaurentPoly]:
        return {key: LaurentPoly.variable(v) for key, v in self.variables.items()}

    def names(self, registry: VariableRegistry = SYMBOLS) -> Dict[Index, str]:
        return {key: registry.name(v) for key, v in sorted(self.variables.items())}

    def __repr__(self) -> str:
        return f"Seed(path={self.path})"


@dataclass(frozen=True)
class WeightSystem:
    """Skeleton weights y_1..y_{2r+1}; y[0] is y_1"""

    r: int
    y: Tuple[Coefficient, ...]
    path: Optional[MotzkinPath] = None

    def __post_init__(self):
        if len(self.y) != 2 * self.r + 1:
            raise ValueError(f"Expected {2 * self.r + 1} weights for r={self.r}, got {len(self.y)}")

    def __getitem__(self, i: int) -> Coefficient:
        """y_i, 1-indexed"""
        if not 1 <= i <= len(self.y):
            raise IndexError(f"y_{i} outside 1..{len(self.y)}")
        return self.y[i - 1]

    def __len__(self) -> int:
        return len(self.y)

    def to_laurent(self) -> "WeightSystem":
        y = tuple(w.to_laurent() if isinstance(w, LaurentRatio) else w for w in self.y)
        return WeightSystem(self.r, y, self.path)


def abstract_weights(r: int, registry: VariableRegistry = SYMBOLS) -> WeightSystem:
    """Formal weights y1..y_{2r+1}"""
    y = tuple(
        LaurentPoly.variable(registry.intern(config.WEIGHT_VAR_FORMAT.format(i=i)))
        for i in range(1, 2 * r + 2)
    )
    return WeightSystem(r, y)


class QSystem:
    """
    Q-system values in one seed, memoized per instance

    Forward steps (n > m_a + 1) only use forward or seed values and backward
    steps (n < m_a) only backward or seed values, so the recursion is
    well-founded.
    """

    def __init__(self, seed: Seed):
        self.seed = seed
        self.rank = seed.rank
        self._memo: Dict[Index, LaurentPoly] = seed.initial_values()

    @classmethod
    def from_path(cls, path: Union[MotzkinPath, Sequence[int]]) -> "QSystem":
        if not isinstance(path, MotzkinPath):
            path = MotzkinPath(tuple(path))
        return cls(Seed.from_path(path))

    @property
    def path(self) -> MotzkinPath:
        return self.seed.path

    def R(self, alpha: int, n: int) -> LaurentPoly:
        if alpha == 0 or alpha == self.rank + 1:
            return LaurentPoly.one()
        if not 0 <= alpha <= self.rank + 1:
            raise IndexError(f"alpha={alpha} outside 0..{self.rank + 1}")
        key = (alpha, n)
        if key in self._memo:
            return self._memo[key]

        m_a = self.path[alpha]
        step = -1 if n > m_a + 1 else 1
        prev, prev2 = n + step, n + 2 * step
        numerator = self.R(alpha, prev) ** 2 + self.R(alpha + 1, prev) * self.R(alpha - 1, prev)
        try:
            value = numerator.exact_div(self.R(alpha, prev2))
        except NotDivisible as e:
            raise NotDivisible(f"Q-system step R[{alpha},{n}] in seed {self.path}: {e}") from e
        self._memo[key] = value
        logger.debug("R[%d,%d] in seed %s: %d terms (memo %d)", alpha, n, self.path, len(value), len(self._memo))
        return value

    def lam(self, alpha: int, n: int) -> LaurentRatio:
        """lambda_{a,n} = R_{a,n+1} / R_{a,n}"""
        return LaurentRatio(self.R(alpha, n + 1), self.R(alpha, n))

    def mu(self, alpha: int, n: int) -> LaurentRatio:
        """mu_{a,n} = R_{a,n} / R_{a-1,n}"""
        return LaurentRatio(self.R(alpha, n), self.R(alpha - 1, n))

    def memo_size(self) -> int:
        return len(self._memo)


def compute_R(seed: Union[Seed, QSystem], alpha: int, n: int) -> LaurentPoly:
    system = seed if isinstance(seed, QSystem) else QSystem(seed)
    if not 1 <= alpha <= system.rank:
        raise IndexError(f"alpha={alpha} outside 1..{system.rank}")
    return system.R(alpha, n)


def mutate(
    path: MotzkinPath,
    values: Mapping[Index, LaurentPoly],
    alpha: int,
    direction: str = "forward",
) -> Tuple[MotzkinPath, Dict[Index, LaurentPoly]]:
    """
    One Q-system mutation of the seed x_m at alpha

    Args:
        path: current Motzkin path m
        values: the 2r seed values keyed by (alpha, n)
        alpha: node to mutate
        direction: 'forward' (m -> m + e_alpha) or 'backward'

    Returns:
        (new path, new values)
    """
    if direction not in ("forward", "backward"):
        raise ValueError(f"Unknown direction {direction!r}")
    delta = 1 if direction == "forward" else -1
    new_path = path.bumped(alpha, delta)
    r = path.rank

    def at(a: int, n: int) -> LaurentPoly:
        if a == 0 or a == r + 1:
            return LaurentPoly.one()
        return values[(a, n)]

    m_a = path[alpha]
    if delta > 0:
        pivot, dropped, new_time = m_a + 1, m_a, m_a + 2
    else:
        pivot, dropped, new_time = m_a, m_a + 1, m_a - 1
    numerator = at(alpha, pivot) ** 2 + at(alpha + 1, pivot) * at(alpha - 1, pivot)
    try:
        new_value = numerator.exact_div(at(alpha, dropped))
    except NotDivisible as e:
        raise NotDivisible(f"{direction} mutation at alpha={alpha} of seed {path}: {e}") from e

    new_values = {k: v for k, v in values.items() if k != (alpha, dropped)}
    new_values[(alpha, new_time)] = new_value
    logger.debug("Mutated %s at alpha=%d (%s) -> %s", path, alpha, direction, new_path)
    return new_path, new_values


def det_formula_R(system: QSystem, alpha: int, n: int) -> LaurentPoly:
    """R_{alpha,n} as the alpha x alpha Hankel determinant of R_{1,.}"""
    matrix = [[system.R(1, n + i + j - alpha - 1) for j in range(1, alpha + 1)] for i in range(1, alpha + 1)]
    return bareiss_det(matrix)


def conserved_c(system: QSystem, p: int, n: int) -> LaurentPoly:
    """
    The integral of motion c_p evaluated at time n

    Minor of the (r+1) x (r+2) matrix (R_{1,n+i+j-2}) with column r+2-p
    removed. p = 0 and p = r+1 give the constant 1.
    """
    r = system.rank
    if not 0 <= p <= r + 1:
        raise IndexError(f"p={p} outside 0..{r + 1}")
    removed = r + 2 - p
    columns = [j for j in range(1, r + 3) if j != removed]
    matrix = [[system.R(1, n + i + j - 2) for j in columns] for i in range(1, r + 2)]
    return bareiss_det(matrix)


def check_conservation(system: QSystem, p: int, times: Sequence[int] = config.CONSERVATION_TIMES) -> LaurentPoly:
    """c_p recomputed at every time; ConservationFailure if any differs"""
    values = [conserved_c(system, p, n) for n in times]
    for n, value in zip(times[1:], values[1:]):
        if value != values[0]:
            raise ConservationFailure(f"c_{p} in seed {system.path} differs between n={times[0]} and n={n}")
    return values[0]


def recursion_coefficients(system: QSystem, window: Sequence[int] = range(0, 4)) -> List[LaurentPoly]:
    """
    [c_0, ..., c_{r+1}] with sum_m (-1)^m c_{r+1-m} R_{1,n+m} = 0 checked on window
    """
    r = system.rank
    c = [check_conservation(system, p) for p in range(r + 2)]
    for n in window:
        total = LaurentPoly.zero()
        for m in range(r + 2):
            total = total + c[r + 1 - m] * system.R(1, n + m) * (-1) ** m
        if total:
            raise ConservationFailure(f"Linear recursion fails at n={n} in seed {system.path}")
    return c


class HardParticleGraph:
    """
    G_r: 2r+1 vertices, 0/1 adjacency (vertex i is row i-1)

    Edges 1-2, 2r-2r+1, and 2i-2i+1, 2i-2i+2, 2i+1-2i+2.
    """

    def __init__(self, r: int):
        if r < 0:
            raise ValueError(f"r must be >= 0, got {r}")
        self.r = r
        size = 2 * r + 1
        adjacency = np.zeros((size, size), dtype=np.int64)
        pairs = [(1, 2), (2 * r, 2 * r + 1)]
        for i in range(1, r + 1):
            pairs += [(2 * i, 2 * i + 1), (2 * i, 2 * i + 2), (2 * i + 1, 2 * i + 2)]
        for a, b in pairs:
            if 1 <= a <= size and 1 <= b <= size and a != b:
                adjacency[a - 1, b - 1] = adjacency[b - 1, a - 1] = 1
        self.adjacency = adjacency

    @property
    def size(self) -> int:
        return 2 * self.r + 1

    def edges(self) -> List[Tuple[int, int]]:
        rows, cols = np.nonzero(np.triu(self.adjacency))
        return [(int(a) + 1, int(b) + 1) for a, b in zip(rows, cols)]

    def is_independent(self, occupied: Sequence[int]) -> bool:
        v = np.zeros(self.size, dtype=np.int64)
        v[[i - 1 for i in occupied]] = 1
        return int(v @ self.adjacency @ v) == 0


def hard_particle_partition(r: int, weights: Sequence[Coefficient]) -> List[Coefficient]:
    """
    [Z_0, ..., Z_{r+1}] for G_r by removing the top two vertices

        Z^{G_r}_m = Z^{G_{r-1}}_m + y_{2r+1} Z^{G_{r-1}}_{m-1} + y_{2r} Z^{G_{r-2}}_{m-1}
    """
    weights = list(weights)
    if len(weights) != 2 * r + 1:
        raise ValueError(f"Expected {2 * r + 1} weights, got {len(weights)}")
    one = ring_one(weights[0])
    zero = ring_zero(weights[0])
    older = [one]                # G_{-1}
    prev = [one, weights[0]]     # G_0
    for k in range(1, r + 1):
        cur = []
        for m in range(k + 2):
            z = prev[m] if m < len(prev) else zero
            if m >= 1:
                z = z + weights[2 * k] * prev[m - 1]
                if m - 1 < len(older):
                    z = z + weights[2 * k - 1] * older[m - 1]
            cur.append(z)
        older, prev = prev, cur
    return prev


def hard_particle_Z(g: HardParticleGraph, weights: Sequence[Coefficient], m: int) -> Coefficient:
    z = hard_particle_partition(g.r, weights)
    if m < 0 or m >= len(z):
        return ring_zero(weights[0])
    return z[m]


def hard_particle_brute_force(g: HardParticleGraph, weights: Sequence[Coefficient], m: int) -> Coefficient:
    """Z_m as a sum over all independent m-subsets of G_r"""
    total = ring_zero(weights[0])
    for occupied in itertools.combinations(range(1, g.size + 1), m):
        if g.is_independent(occupied):
            term = ring_one(weights[0])
            for i in occupied:
                term = term * weights[i - 1]
            total = total + term
    return total


def _monomial_weight(value: LaurentRatio, label: str, path: MotzkinPath) -> LaurentPoly:
    try:
        poly = value.to_laurent()
    except NotDivisible:
        raise NotMonomial(f"{label} for m={path} is not a Laurent polynomial: {value}") from None
    if not poly.is_monomial() or poly.terms[0][1] != 1:
        raise NotMonomial(f"{label} for m={path} is not a unit monomial: {poly}")
    return poly


def weights_from_seed(system: Union[Seed, QSystem]) -> WeightSystem:
    """
    Skeleton weights y_1..y_{2r+1} of the seed x_m

        y_{2a-1} = lambda_{a,m_a} / lambda_{a-1,m_{a-1}}
        y_{2a}   = mu_{a+1,m_a+1} / mu_{a,m_a} * (corrections at descents)

    Works for any Motzkin path; each weight must cancel to a monomial.
    """
    if isinstance(system, Seed):
        system = QSystem(system)
    path, r = system.path, system.rank

    def m(a: int) -> int:
        return path[a] if 1 <= a <= r else 0

    def lam(a: int, n: int) -> LaurentRatio:
        if a == 0 or a == r + 1:
            return LaurentRatio.one()
        return system.lam(a, n)

    y: List[LaurentPoly] = []
    for a in range(1, r + 1):
        odd = lam(a, m(a)) / lam(a - 1, m(a - 1))
        y.append(_monomial_weight(odd, f"y_{2 * a - 1}", path))

        even = system.mu(a + 1, m(a) + 1) / system.mu(a, m(a))
        if a < r and m(a) == m(a + 1) + 1:
            even = even * lam(a + 1, m(a + 1)) / lam(a + 1, m(a))
        if a > 1 and m(a - 1) == m(a) + 1:
            even = even * lam(a - 1, m(a)) / lam(a - 1, m(a - 1))
        y.append(_monomial_weight(even, f"y_{2 * a}", path))
    y.append(_monomial_weight(LaurentRatio.one() / lam(r, m(r)), f"y_{2 * r + 1}", path))
    return WeightSystem(r, tuple(y), path)


def weights_at_time(system: QSystem, k: int) -> WeightSystem:
    """
    Weights y_{i,k} built from R at times k and k+1, as ratios

        y_{2a-1,k} = R_{a-1,k} R_{a,k+1} / (R_{a,k} R_{a-1,k+1})
        y_{2a,k}   = R_{a-1,k} R_{a+1,k+1} / (R_{a,k} R_{a,k+1})
    """
    r = system.rank
    R = system.R
    y: List[LaurentRatio] = []
    for a in range(1, r + 2):
        y.append(LaurentRatio(R(a - 1, k) * R(a, k + 1), R(a, k) * R(a - 1, k + 1)))
        if a <= r:
            y.append(LaurentRatio(R(a - 1, k) * R(a + 1, k + 1), R(a, k) * R(a, k + 1)))
    return WeightSystem(r, tuple(y))


def swap_halves(seed: Seed) -> Dict[VarId, LaurentPoly]:
    """Bindings R_{a,0} <-> R_{a,1} realizing n <-> 1-n on the seed x_0"""
    if any(v != 0 for v in seed.path):
        raise ValueError(f"swap_halves needs the seed m=0, got {seed.path}")
    bindings = {}
    for a in range(1, seed.rank + 1):
        bindings[seed.variables[(a, 0)]] = seed.value(a, 1)
        bindings[seed.variables[(a, 1)]] = seed.value(a, 0)
    return bindings


_SEED_LINE = re.compile(r"R\s+(-?\d+)\s+(-?\d+)\s*=\s*([A-Za-z_][A-Za-z0-9_]*)")


def read_seed_file(path: Union[str, Path], registry: VariableRegistry = SYMBOLS) -> Seed:
    """
    Parse a seed file

    One 'R alpha n = name' per line; blank lines and '#' comments are
    skipped. Rank and Motzkin path are inferred from the entries.
    """
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise SeedFileError(f"Cannot read seed file {path}: {e}") from e

    entries: Dict[Index, str] = {}
    for lineno, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        match = _SEED_LINE.fullmatch(line)
        if not match:
            raise SeedFileError(f"{path}:{lineno}: expected 'R alpha n = name', got {line!r}")
        key = (int(match.group(1)), int(match.group(2)))
        if key in entries:
            raise SeedFileError(f"{path}:{lineno}: duplicate entry R {key[0]} {key[1]}")
        if match.group(3) in entries.values():
            raise SeedFileError(f"{path}:{lineno}: name {match.group(3)!r} used twice")
        entries[key] = match.group(3)

    if not entries:
        raise SeedFileError(f"{path}: no seed entries")
    alphas = sorted({a for a, _ in entries})
    r = len(alphas)
    if alphas != list(range(1, r + 1)):
        raise SeedFileError(f"{path}: alpha values {alphas} are not 1..{r}")
    m = []
    for a in alphas:
        times = sorted(n for b, n in entries if b == a)
        if len(times) != 2 or times[1] != times[0] + 1:
            raise SeedFileError(f"{path}: alpha={a} needs two consecutive times, got {times}")
        m.append(times[0])
    try:
        motzkin = MotzkinPath(tuple(m))
    except MotzkinViolation as e:
        raise SeedFileError(f"{path}: {e}") from e
    variables = {key: registry.intern(name) for key, name in entries.items()}
    logger.debug("Read seed %s from %s", motzkin, path)
    return Seed(motzkin, variables)
