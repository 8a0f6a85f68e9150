"""
Verification suites for the Q-system path models

Each suite is a list of named checks; a check returns True or False (an
exception counts as an error). VerificationRunner runs them, optionally in
worker processes, and renders a report.
"""

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

from app import config

from . import compact, graphs, qsystem, rank2, totalpos
from .laurent import LaurentPoly, LaurentRatio
from .qsystem import MotzkinPath, QSystem
from .utils import check_name, timeit

logger = logging.getLogger(__name__)

SUITES = ("qsys", "rank2", "paths", "compact", "totalpos")

# Fixture path with nine nodes: two descending runs of length 2 and 3
FIXTURE_PATH = MotzkinPath((2, 1, 2, 2, 2, 1, 0, 0, 1))
FIXTURE_SIGMA = (8, 9, 7, 6, 5, 4, 2, 3, 1)
FIXTURE_TAU = (9, 8, 5, 6, 7, 4, 3, 1, 2)
FIXTURE_MERGE = (
    "0 ~ 1", "2 ~ 2'", "3 ~ 4", "5 ~ 5'", "6 ~ 6'",
    "7 ~ 7'", "8 ~ 8'", "9 ~ 9'", "10 ~ 11", "12 ~ 13",
)


@dataclass(frozen=True)
class Check:
    name: str
    func: Callable[..., bool]
    args: Tuple = ()


def _domains(r: int) -> List[MotzkinPath]:
    return [m for k in range(1, r + 1) for m in graphs.fundamental_domain(k)]


# -- qsys ---------------------------------------------------------------------


def a1_conserved() -> bool:
    system = QSystem.from_path((0,))
    x0, x1 = system.R(1, 0), system.R(1, 1)
    expected = x1 * x0 ** -1 + (x0 * x1) ** -1 + x0 * x1 ** -1
    return qsystem.check_conservation(system, 1) == expected


def conservation(r: int) -> bool:
    qsystem.recursion_coefficients(QSystem.from_path(MotzkinPath.zero(r)))
    return True


def det_formula(m: MotzkinPath) -> bool:
    system = QSystem.from_path(m)
    return all(
        qsystem.det_formula_R(system, alpha, n) == system.R(alpha, n)
        for alpha in range(1, m.rank + 1)
        for n in range(m[alpha] - 1, m[alpha] + 3)
    )


def positivity(m: MotzkinPath) -> bool:
    system = QSystem.from_path(m)
    lo, hi = config.POSITIVITY_WINDOW
    for alpha in range(1, m.rank + 1):
        for n in range(m[alpha] + lo, m[alpha] + hi + 1):
            if not system.R(alpha, n).is_positive():
                logger.debug("R[%d,%d] in seed %s is not positive", alpha, n, m)
                return False
    return True


def hard_particle(r: int) -> bool:
    weights = qsystem.abstract_weights(r)
    z = qsystem.hard_particle_partition(r, weights.y)
    det = graphs.hard_particle_det(r, weights)
    g = qsystem.HardParticleGraph(r)
    brute = [qsystem.hard_particle_brute_force(g, weights.y, k) for k in range(r + 2)]
    return list(det) == z and brute == z


def conserved_partition(r: int) -> bool:
    """c_p in the seed x_0 equals Z_p of G_r at the seed weights, p = 0..r+1"""
    system = QSystem.from_path(MotzkinPath.zero(r))
    weights = qsystem.weights_from_seed(system).y
    z = qsystem.hard_particle_partition(r, weights)
    g = qsystem.HardParticleGraph(r)
    for p in range(r + 2):
        c = qsystem.conserved_c(system, p, 0)
        if c != z[p] or c != qsystem.hard_particle_Z(g, weights, p):
            logger.debug("c_%d differs from Z_%d for r=%d", p, p, r)
            return False
    return True


def time_invariance(r: int) -> bool:
    system = QSystem.from_path(MotzkinPath.zero(r))
    at0 = qsystem.hard_particle_partition(r, qsystem.weights_at_time(system, 0).y)
    at1 = qsystem.hard_particle_partition(r, qsystem.weights_at_time(system, 1).y)
    return all(LaurentRatio.coerce(a) == b for a, b in zip(at0, at1))


def mutation_roundtrip(m: MotzkinPath) -> bool:
    values = QSystem.from_path(m).seed.initial_values()
    for alpha in range(1, m.rank + 1):
        try:
            path, moved = qsystem.mutate(m, values, alpha, "forward")
        except ValueError:
            continue
        back_path, back = qsystem.mutate(path, moved, alpha, "backward")
        if back_path != m or back != values:
            return False
    return True


def qsys_checks(r: int, order: int) -> List[Check]:
    checks = [Check(check_name("qsys", "a1-conserved"), a1_conserved)]
    for k in range(1, r + 1):
        checks.append(Check(check_name("qsys", f"conservation-r{k}"), conservation, (k,)))
        checks.append(Check(check_name("qsys", f"time-invariance-r{k}"), time_invariance, (k,)))
        checks.append(Check(check_name("qsys", f"conserved-partition-r{k}"), conserved_partition, (k,)))
    for k in range(0, r + 1):
        checks.append(Check(check_name("qsys", f"hard-particle-r{k}"), hard_particle, (k,)))
    for m in _domains(r):
        checks.append(Check(check_name("qsys", "positivity", m), positivity, (m,)))
        checks.append(Check(check_name("qsys", "det-formula", m), det_formula, (m,)))
        checks.append(Check(check_name("qsys", "mutation-roundtrip", m), mutation_roundtrip, (m,)))
    return checks


# -- rank2 --------------------------------------------------------------------


def rank2_recursion(b: int, c: int) -> bool:
    system = rank2.Rank2System(b, c)
    for n in range(-3, 5):
        lhs = system.x(n + 1) * system.x(n - 1)
        if lhs != 1 + system.x(n) ** system.exponent(n):
            return False
    return True


def rank2_closed_forms(order: int) -> bool:
    s22 = rank2.Rank2System(2, 2)
    even = rank2.Rank2System(1, 4, 0)
    odd = rank2.Rank2System(1, 4, 1)
    limit = min(order, 4)
    ok = all(rank2.closed_form_14(0, n) == even.x(2 * n) for n in range(limit + 1))
    ok = ok and all(rank2.closed_form_14(1, n) == odd.x(2 * n + 2) for n in range(limit + 1))
    ok = ok and all(rank2.odd_from_even_14(n) == even.x(2 * n + 1) for n in range(limit))
    return ok and all(rank2.closed_form_22(n) == s22.x(n) for n in range(order + 1))


def rank2_series(order: int) -> bool:
    s22 = rank2.Rank2System(2, 2)
    expected = [s22.x(n) for n in range(order + 1)]
    ok = list(rank2.series_22(s22, order)) == expected
    ok = ok and list(rank2.path_series_22(s22, order)) == expected
    for case, system in ((0, rank2.Rank2System(1, 4, 0)), (1, rank2.Rank2System(1, 4, 1))):
        shift = 0 if case == 0 else 2
        expected = [system.x(2 * n + shift) for n in range(order + 1)]
        ok = ok and list(rank2.series_14(case, system, order)) == expected
        ok = ok and list(rank2.path_series_14(case, system, order)) == expected
        a1, a2, a3 = rank2.weights_14(case, system)
        ok = ok and a1 * a3 == 1 + a2
    return ok


def rank2_orbits() -> bool:
    s22 = rank2.Rank2System(2, 2)
    rank2.check_orbit(s22, rank2.conserved_22(s22))
    even = rank2.Rank2System(1, 4, 0)
    rank2.check_orbit(even, rank2.conserved_14(0, even), stride=2)
    odd = rank2.Rank2System(1, 4, 1)
    rank2.check_orbit(odd, rank2.conserved_14(1, odd), stride=2)
    return True


def rank2_checks(r: int, order: int) -> List[Check]:
    checks = [
        Check(check_name("rank2", f"recursion-{b}{c}"), rank2_recursion, (b, c))
        for b, c in rank2.AFFINE_CASES
    ]
    checks.append(Check(check_name("rank2", "closed-forms"), rank2_closed_forms, (order,)))
    checks.append(Check(check_name("rank2", "series"), rank2_series, (order,)))
    checks.append(Check(check_name("rank2", "conserved-orbits"), rank2_orbits))
    return checks


# -- paths --------------------------------------------------------------------


def rerooting(m: MotzkinPath, order: int) -> bool:
    system = QSystem.from_path(m)
    series = graphs.rerooted_series(system, order)
    return all(series[n] == system.R(1, n) for n in range(order + 1))


def enumeration_oracle(m: MotzkinPath, order: int) -> bool:
    gamma = graphs.build_gamma(m)
    limit = min(order, 4)
    series = graphs.path_series(gamma, graphs.ROOT, graphs.ROOT, limit)
    for n in range(limit + 1):
        total = LaurentPoly.zero()
        for walk in graphs.enumerate_paths(gamma, graphs.ROOT, graphs.ROOT, n):
            total = total + walk.weight
        if total != series[n]:
            return False
    return True


def heap_identity(r: int, order: int) -> bool:
    weights = qsystem.abstract_weights(r)
    resolvent = graphs.path_series(graphs.build_g_tilde(r, weights), graphs.ROOT, graphs.ROOT, order)
    return resolvent.agrees_with(graphs.heap_series(r, weights, order))


def continued_fractions(r: int, order: int) -> bool:
    weights = qsystem.abstract_weights(r)
    resolvent = graphs.path_series(graphs.build_g_tilde(r, weights), graphs.ROOT, graphs.ROOT, order)
    cf = graphs.continued_fraction(r, weights)
    ok = graphs.eval_cf(cf, order).agrees_with(resolvent)
    ok = ok and graphs.eval_cf(graphs.rearrange_R1(cf), order).agrees_with(resolvent)

    ratios = [LaurentRatio.coerce(y) for y in weights.y]
    symbolic = graphs.continued_fraction(r, ratios)
    rearranged = graphs.rearrange_R2(symbolic, symbolic.depth - 2)
    ok = ok and graphs.eval_cf(rearranged, order).agrees_with(resolvent)
    if r == 0:
        return ok

    compact_cf = graphs.eval_cf(graphs.compact_continued_fraction(weights), order)
    compact_resolvent = graphs.path_series(
        compact.build_gamma_prime_direct(MotzkinPath.zero(r), weights).graph,
        compact.COMPACT_ROOT, compact.COMPACT_ROOT, order,
    )
    return ok and compact_cf.agrees_with(compact_resolvent)


def path_continued_fraction(m: MotzkinPath, order: int) -> bool:
    weights = qsystem.abstract_weights(m.rank)
    resolvent = graphs.path_series(graphs.build_gamma(m, weights), graphs.ROOT, graphs.ROOT, order)
    return graphs.eval_cf(graphs.continued_fraction(m, weights), order).agrees_with(resolvent)


def mutation_weights(m: MotzkinPath) -> bool:
    return all(graphs.check_mutation(m, alpha) for alpha in graphs.admissible_mutations(m))


def lgv(m: MotzkinPath) -> bool:
    system = QSystem.from_path(m)
    for alpha in range(1, m.rank + 1):
        for n in range(alpha - 1, alpha + 2):
            if graphs.lgv_R(system, alpha, n) != system.R(alpha, n + m[1]):
                return False
    return True


def lgv_families() -> bool:
    """Two nested walks on G~_2 for R_{2,3}: six families, weight = determinant"""
    system = QSystem.from_path(MotzkinPath.zero(2))
    gamma = graphs.build_gamma(system.path, qsystem.weights_from_seed(system))
    families = graphs.lgv_families(gamma, 2, 3)
    z = graphs.path_series(gamma, graphs.ROOT, graphs.ROOT, 4)
    det = z[2] * z[4] - z[3] * z[3]
    weight = graphs.family_weight(families)
    return len(families) == 6 and weight == det and weight * system.R(1, 0) ** 2 == system.R(2, 3)


def paths_checks(r: int, order: int) -> List[Check]:
    checks = [Check(check_name("paths", "lgv-families"), lgv_families)]
    for k in range(0, r + 1):
        checks.append(Check(check_name("paths", f"heap-r{k}"), heap_identity, (k, order)))
        checks.append(Check(check_name("paths", f"continued-fraction-r{k}"), continued_fractions, (k, order)))
    for m in _domains(r):
        checks.append(Check(check_name("paths", "rerooting", m), rerooting, (m, min(order, 6))))
        checks.append(Check(check_name("paths", "enumeration", m), enumeration_oracle, (m, order)))
        checks.append(Check(check_name("paths", "mutation-weights", m), mutation_weights, (m,)))
        checks.append(Check(check_name("paths", "lgv", m), lgv, (m,)))
        if any(m):
            checks.append(Check(check_name("paths", "continued-fraction", m), path_continued_fraction, (m, min(order, 6))))
    return checks


# -- compact ------------------------------------------------------------------


def structural_identity(m: MotzkinPath) -> bool:
    return compact.compact_graph(m).same_as(compact.build_gamma_prime_direct(m))


def resolvent_equality(m: MotzkinPath, order: int) -> bool:
    return compact.verify_resolvent_equality(m, order)


def formulation_chain(m: MotzkinPath, order: int) -> bool:
    """Q-system = Gamma_m at (1,1) = Gamma'_m at (1,1) = network resolvent, all positive"""
    system = QSystem.from_path(m)
    weights = qsystem.weights_from_seed(system)
    expected = compact.closed_form_prime(system, order)
    gamma = graphs.path_series(graphs.build_gamma(m, weights), (1, False), (1, False), order)
    prime = compact.compact_series(system, order)
    p = totalpos.build_P(m, weights)
    f = totalpos.factor_F(m, totalpos.factorization(m, weights))
    network = totalpos.network_resolvent(p, f, 0, 0, order)
    return (
        gamma.agrees_with(expected)
        and prime.agrees_with(expected)
        and network.agrees_with(expected)
        and all(c.is_positive() for c in prime)
    )


def hk_lemma(k: int, order: int) -> bool:
    return compact.verify_hk_lemma(k, order=order)


def closed_expansion(r: int, limit: int) -> bool:
    system = QSystem.from_path(MotzkinPath.zero(r))
    return all(compact.closed_expansion_m0(r, n) == system.R(1, n + 1) for n in range(limit + 1))


def fixture_compaction() -> bool:
    merged = compact.compact_graph(FIXTURE_PATH).merge_text()
    expected = "".join(f"{j}: {pair}\n" for j, pair in enumerate(FIXTURE_MERGE, start=1))
    return merged == expected and structural_identity(FIXTURE_PATH)


def ascending_corrections() -> bool:
    """Gamma'_(0,1,2): up edges 1->3 and 2->4 weigh -1, 1->4 weighs +1"""
    graph = compact.build_gamma_prime_direct(MotzkinPath((0, 1, 2))).graph
    expected = {(1, 3): -1, (2, 4): -1, (1, 4): 1}
    for (a, b), sign in expected.items():
        e = graph.edge((a, False), (b, False))
        if e is None or e.t_degree != 0 or e.weight != sign:
            return False
    return True


def compact_checks(r: int, order: int) -> List[Check]:
    checks = [
        Check(check_name("compact", "merge-fixture"), fixture_compaction),
        Check(check_name("compact", "ascending-corrections"), ascending_corrections),
    ]
    for k in range(0, min(config.MAX_HK_CHAIN, r + 1) + 1):
        checks.append(Check(check_name("compact", f"hk-lemma-k{k}"), hk_lemma, (k, min(order, 6))))
    for k in range(1, r + 1):
        checks.append(Check(check_name("compact", f"closed-expansion-r{k}"), closed_expansion, (k, min(order, 5))))
    for m in _domains(r):
        checks.append(Check(check_name("compact", "structure", m), structural_identity, (m,)))
        checks.append(Check(check_name("compact", "resolvent", m), resolvent_equality, (m, order)))
        checks.append(Check(check_name("compact", "chain", m), formulation_chain, (m, min(order, 6))))
    return checks


# -- totalpos -----------------------------------------------------------------


def sigma_tau_fixture() -> bool:
    return totalpos.sigma_tau(FIXTURE_PATH) == (FIXTURE_SIGMA, FIXTURE_TAU)


def decomposition(m: MotzkinPath) -> bool:
    totalpos.build_N_B(m)
    return totalpos.check_conjugacy(m) and totalpos.check_master_identity(m)


def resolvent_theorem(m: MotzkinPath, order: int) -> bool:
    return totalpos.verify_resolvent_theorem(m, order)


def positive_minors(m: MotzkinPath) -> bool:
    system = QSystem.from_path(m)
    point = {name: 1 for name in system.seed.names().values()}
    return totalpos.check_total_positivity(m, point)


def totalpos_checks(r: int, order: int) -> List[Check]:
    checks = [Check(check_name("totalpos", "sigma-tau-fixture"), sigma_tau_fixture)]
    for m in _domains(r):
        checks.append(Check(check_name("totalpos", "decomposition", m), decomposition, (m,)))
        checks.append(Check(check_name("totalpos", "resolvent-theorem", m), resolvent_theorem, (m, min(order, 6))))
        if m.rank <= 3:
            checks.append(Check(check_name("totalpos", "minors", m), positive_minors, (m,)))
    return checks


_BUILDERS: Dict[str, Callable[[int, int], List[Check]]] = {
    "qsys": qsys_checks,
    "rank2": rank2_checks,
    "paths": paths_checks,
    "compact": compact_checks,
    "totalpos": totalpos_checks,
}


def build_suite(suite: str, r: int, order: int) -> List[Check]:
    if suite == "all":
        return list(itertools.chain.from_iterable(_BUILDERS[s](r, order) for s in SUITES))
    if suite not in _BUILDERS:
        raise ValueError(f"Unknown suite {suite!r}; choose from {', '.join(SUITES + ('all',))}")
    return _BUILDERS[suite](r, order)


# -- runner -------------------------------------------------------------------


def execute(check: Check) -> Dict:
    """Run one check; top-level so worker processes can receive it"""
    try:
        timed = timeit(check.func)(*check.args)
    except Exception as e:
        return {"name": check.name, "status": "ERROR", "error": f"{type(e).__name__}: {e}", "time_s": 0.0}
    status = "PASSED" if timed["passed"] else "FAILED"
    return {"name": check.name, "status": status, "time_s": timed["time_s"]}


class VerificationRunner:
    """Runs suites of checks and summarizes them"""

    def __init__(self, verbose: bool = False, jobs: int = config.DEFAULT_JOBS):
        self.verbose = verbose
        self.jobs = max(1, jobs)

    def log(self, message: str, level: str = "INFO"):
        if self.verbose:
            print(f"[{level}] {message}")

    def run_check(self, check: Check) -> Dict:
        self.log(f"Checking: {check.name}", "TEST")
        result = execute(check)
        self._report(result)
        return result

    def _report(self, result: Dict):
        if result["status"] == "PASSED":
            self.log(f"   PASSED: {result['name']} ({result['time_s']:.3f}s)", "SUCCESS")
        elif result["status"] == "FAILED":
            self.log(f"   FAILED: {result['name']}", "ERROR")
        else:
            self.log(f"   ERROR: {result['name']}: {result['error']}", "ERROR")
        if result["time_s"] > config.SLOW_CHECK_SECONDS:
            self.log(f"   ⚠️  Slow check: {result['time_s']:.1f}s (limit {config.SLOW_CHECK_SECONDS:.0f}s)", "WARN")

    def run_suite(self, suite: str, r: int, order: int = config.DEFAULT_ORDER) -> Dict:
        if r > config.MAX_RANK:
            raise ValueError(f"r={r} exceeds the configured bound {config.MAX_RANK}")
        checks = build_suite(suite, r, order)
        self.log(f"Running suite '{suite}': {len(checks)} checks (r <= {r}, order {order})", "INFO")

        if self.jobs > 1:
            with ProcessPoolExecutor(max_workers=self.jobs) as pool:
                results = list(pool.map(execute, checks))
            for result in results:
                self._report(result)
        else:
            results = [self.run_check(check) for check in checks]

        passed = sum(1 for res in results if res["status"] == "PASSED")
        errors = sum(1 for res in results if res["status"] == "ERROR")
        summary = {
            "suite": suite,
            "rank": r,
            "order": order,
            "total_checks": len(results),
            "passed": passed,
            "failed": len(results) - passed - errors,
            "errors": errors,
            "pass_rate": f"{(passed / len(results) * 100):.1f}%" if results else "N/A",
            "slow_checks": sum(1 for res in results if res["time_s"] > config.SLOW_CHECK_SECONDS),
            "total_time_s": sum(res["time_s"] for res in results),
            "results": results,
        }
        self.log(f"Suite complete: {passed}/{len(results)} passed", "SUMMARY")
        logger.debug("Suite %s finished: %d/%d", suite, passed, len(results))
        return summary

    def generate_report(self, summary: Dict, output_file: Optional[str] = None) -> str:
        report = f"""
{'='*70}
VERIFICATION REPORT: {summary.get('suite', 'N/A')}
{'='*70}

SUMMARY
-------
Rank bound:            {summary.get('rank', 'N/A')}
Truncation order:      {summary.get('order', 'N/A')}
Total Checks:          {summary.get('total_checks', 0)}
Passed:                {summary.get('passed', 0)}
Failed:                {summary.get('failed', 0)}
Errors:                {summary.get('errors', 0)}
Pass Rate:             {summary.get('pass_rate', 'N/A')}
Slow Checks:           {summary.get('slow_checks', 0)}
Total Time:            {summary.get('total_time_s', 0.0):.3f}s

RESULTS DETAIL
--------------
"""
        for result in summary.get("results", []):
            report += f"\n  {result['name']}: {result['status']} ({result['time_s']:.3f}s)"
            if "error" in result:
                report += f"\n    {result['error']}"

        report += f"\n\n{'='*70}\n"

        if output_file:
            Path(output_file).parent.mkdir(parents=True, exist_ok=True)
            Path(output_file).write_text(report, encoding="utf-8")
            self.log(f"Report saved to: {output_file}", "INFO")
        return report
