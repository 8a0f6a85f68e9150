"""
Command-line interface
"""

import json

import pytest

import qsys_cli
from app.models import compact
from app.models.laurent import LaurentPoly, var
from app.models.qsystem import MotzkinPath, QSystem


def test_rvalue_prints_parseable_polynomial(capsys):
    assert qsys_cli.main(["rvalue", "-m", "0", "-a", "1", "-n", "2"]) == 0
    out = capsys.readouterr().out.strip()
    assert LaurentPoly.from_text(out) == (var("R1_1") ** 2 + 1) * var("R1_0") ** -1


def test_rvalue_check_positive(capsys):
    assert qsys_cli.main(["rvalue", "-r", "2", "-a", "1", "-n", "4", "--check-positive"]) == 0
    out = capsys.readouterr().out.strip()
    assert LaurentPoly.from_text(out) == QSystem.from_path(MotzkinPath.zero(2)).R(1, 4)


def test_rvalue_from_seed_file(tmp_path, capsys):
    seed_file = tmp_path / "seed.txt"
    seed_file.write_text("R 1 0 = a\nR 1 1 = b\n", encoding="utf-8")
    assert qsys_cli.main(["rvalue", "--seed-file", str(seed_file), "-a", "1", "-n", "2"]) == 0
    assert LaurentPoly.from_text(capsys.readouterr().out.strip()) == (var("b") ** 2 + 1) * var("a") ** -1


@pytest.mark.parametrize(
    "argv",
    [
        pytest.param(["rvalue", "-m", "0,2", "-a", "1", "-n", "0"], id="not-motzkin"),
        pytest.param(["rvalue", "-m", "0,0", "-a", "3", "-n", "0"], id="alpha-out-of-range"),
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    assert qsys_cli.main(argv) == 2
    assert capsys.readouterr().err.startswith("Error:")


def test_rank_and_path_must_agree():
    with pytest.raises(SystemExit) as exc:
        qsys_cli.main(["rvalue", "-r", "3", "-m", "0,0", "-a", "1", "-n", "0"])
    assert exc.value.code == 2


def test_series_csv(capsys):
    assert qsys_cli.main(["series", "-m", "0,0", "-N", "3", "--csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "n,coefficient"
    assert len(lines) == 5
    assert lines[1] == "0,R1_0"


def test_series_json_to_file(tmp_path):
    out = tmp_path / "series.json"
    assert qsys_cli.main(["series", "--rank2", "22", "-N", "4", "-j", "-o", str(out)]) == 0
    payload = json.loads(out.read_text(encoding="utf-8"))
    assert payload["title"] == "x_n for (b,c) = (2,2)"
    assert [row["n"] for row in payload["coefficients"]] == [0, 1, 2, 3, 4]


def test_series_from_paths_matches_direct(capsys):
    qsys_cli.main(["series", "-m", "0,1", "-N", "3", "--csv"])
    direct = capsys.readouterr().out
    qsys_cli.main(["series", "-m", "0,1", "-N", "3", "--csv", "--from-paths"])
    assert capsys.readouterr().out == direct


def test_graph_with_merge_map(tmp_path):
    dot = tmp_path / "g.dot"
    merge = tmp_path / "g.txt"
    argv = ["graph", "-m", "0,1,2", "--variant", "gamma_prime", str(dot), "--merge-map", str(merge)]
    assert qsys_cli.main(argv) == 0
    assert dot.read_text(encoding="utf-8").startswith("digraph")
    assert merge.read_text(encoding="utf-8") == compact.compact_graph(MotzkinPath((0, 1, 2))).merge_text()


def test_merge_map_needs_gamma_prime(tmp_path):
    with pytest.raises(SystemExit) as exc:
        qsys_cli.main(["graph", "-m", "0", str(tmp_path / "g.dot"), "--merge-map", str(tmp_path / "g.txt")])
    assert exc.value.code == 2


def test_verify_rank2_suite(tmp_path, capsys):
    report = tmp_path / "report.txt"
    assert qsys_cli.main(["verify", "--suite", "rank2", "-r", "1", "-N", "4", "--report", str(report)]) == 0
    captured = capsys.readouterr()
    assert "VERIFICATION REPORT: rank2" in captured.out
    assert "✅" in captured.err
    assert report.exists()


def test_minors_at_unit_point(capsys):
    assert qsys_cli.main(["minors", "-m", "0,1"]) == 0
    assert "non-negative" in capsys.readouterr().out


def test_minors_at_zero_coordinate_exit_2(capsys):
    assert qsys_cli.main(["minors", "-m", "0,0", "--point", "R1_0=0"]) == 2
    assert capsys.readouterr().err.startswith("Error:")


def test_minors_bad_point():
    with pytest.raises(SystemExit) as exc:
        qsys_cli.main(["minors", "-m", "0,0", "--point", "R1_0"])
    assert exc.value.code == 2
