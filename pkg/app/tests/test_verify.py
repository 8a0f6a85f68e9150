"""
Verification runner, suites and reports
"""

import pytest

from app import config
from app.models import verify
from app.models.qsystem import MotzkinPath
from app.models.utils import check_name, path_slug, timeit
from app.models.verify import Check, VerificationRunner


def always(value):
    return value


def broken():
    raise ArithmeticError("boom")


def test_execute_statuses():
    assert verify.execute(Check("ok", always, (True,)))["status"] == "PASSED"
    assert verify.execute(Check("no", always, (False,)))["status"] == "FAILED"
    result = verify.execute(Check("err", broken))
    assert result["status"] == "ERROR"
    assert result["error"] == "ArithmeticError: boom"


def test_timeit_and_names():
    timed = timeit(always)(1)
    assert timed["passed"] is True and timed["time_s"] >= 0
    m = MotzkinPath((0, 1, 2))
    assert path_slug(m) == "m0-1-2"
    assert check_name("paths", "lgv", m) == "paths/lgv[0,1,2]"


def test_build_suite():
    names = [c.name for c in verify.build_suite("rank2", 1, 4)]
    assert names == [
        "rank2/recursion-22",
        "rank2/recursion-14",
        "rank2/recursion-41",
        "rank2/closed-forms",
        "rank2/series",
        "rank2/conserved-orbits",
    ]
    everything = verify.build_suite("all", 1, 4)
    assert len(everything) == sum(len(verify.build_suite(s, 1, 4)) for s in verify.SUITES)
    with pytest.raises(ValueError):
        verify.build_suite("nope", 1, 4)


def test_run_suite_summary():
    summary = VerificationRunner().run_suite("rank2", 1, order=4)
    assert summary["suite"] == "rank2"
    assert summary["total_checks"] == 6
    assert summary["passed"] == 6
    assert summary["failed"] == 0 and summary["errors"] == 0
    assert summary["pass_rate"] == "100.0%"
    assert len(summary["results"]) == 6


def test_rank_bound():
    with pytest.raises(ValueError):
        VerificationRunner().run_suite("qsys", config.MAX_RANK + 1)


def test_qsys_suite_rank_one():
    summary = VerificationRunner().run_suite("qsys", 1, order=4)
    assert summary["passed"] == summary["total_checks"]


def test_verbose_log(capsys):
    VerificationRunner(verbose=True).run_check(Check("demo", always, (True,)))
    out = capsys.readouterr().out
    assert "[TEST] Checking: demo" in out
    assert "[SUCCESS]" in out


def test_generate_report(tmp_path):
    runner = VerificationRunner()
    summary = {
        "suite": "demo",
        "rank": 2,
        "order": 4,
        "total_checks": 2,
        "passed": 1,
        "failed": 0,
        "errors": 1,
        "pass_rate": "50.0%",
        "slow_checks": 0,
        "total_time_s": 0.5,
        "results": [
            {"name": "a", "status": "PASSED", "time_s": 0.25},
            {"name": "b", "status": "ERROR", "time_s": 0.0, "error": "ValueError: x"},
        ],
    }
    output = tmp_path / "reports" / "demo.txt"
    report = runner.generate_report(summary, str(output))
    assert output.read_text(encoding="utf-8") == report
    assert "VERIFICATION REPORT: demo" in report
    assert "Pass Rate:             50.0%" in report
    assert "  b: ERROR (0.000s)\n    ValueError: x" in report
