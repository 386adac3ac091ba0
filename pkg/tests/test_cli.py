import json
import subprocess
import sys

import jsonschema
import pytest

from graphcomply import __version__
from graphcomply.cli import main
from graphcomply.graphtext import REPORT_SCHEMA

from conftest import FIXTURES

FIG = {name: str(FIXTURES / name) for name in ("fig1.og", "fig2.cg", "fig3.og", "fig4.cg")}


def run(capsys, *argv):
    status = main(list(argv))
    out, err = capsys.readouterr()
    return status, out, err


def test_validate_fixtures(capsys):
    status, out, _ = run(capsys, "validate", FIG["fig1.og"], FIG["fig2.cg"])
    assert status == 0 and out.count(": ok") == 2


def test_validate_needs_files(capsys):
    status, _, err = run(capsys, "validate")
    assert status == 2 and "at least one file" in err


def test_validate_broken_file(tmp_path, capsys):
    broken = tmp_path / "broken.og"
    broken.write_text("graph g {\n  node A {}\n  arc x: A -> B {}\n}\n")
    status, _, err = run(capsys, "validate", str(broken))
    assert status == 1
    assert f"{broken}:3:7: error: arc 'x' refers to unknown node 'B'" in err


def test_validate_unreadable(tmp_path, capsys):
    status, _, err = run(capsys, "validate", str(tmp_path / "missing.og"))
    assert status == 2 and "cannot read" in err
    other = tmp_path / "graph.txt"
    other.write_text("graph g {}")
    assert run(capsys, "validate", str(other))[0] == 2


def test_member_relational(capsys):
    status, out, _ = run(
        capsys, "member", FIG["fig1.og"], FIG["fig2.cg"], "--node", "Juliet", "--class", "MissCapulet",
        "--kind", "relational",
    )
    assert status == 0 and out == "true\n"


def test_member_right_false_with_reason(capsys):
    status, out, _ = run(
        capsys, "member", FIG["fig1.og"], FIG["fig2.cg"], "--arc", "hasKilled", "--class", "commitSuicide",
        "--kind", "right",
    )
    assert status == 1
    assert out == "false\nreason: destination Tybalt is not a strict member of MrMontague\n"


@pytest.mark.parametrize(
    "args",
    [
        ["--node", "Juliet", "--class", "MissCapulet", "--kind", "full"],
        ["--node", "Juliet", "--class", "MissCapulet", "--kind", "left"],
        ["--arc", "hasKilled", "--class", "commitSuicide", "--kind", "relational"],
        ["--node", "Nobody", "--class", "MissCapulet", "--kind", "strict"],
        ["--arc", "hasKilled", "--class", "MissCapulet", "--kind", "strict"],
        ["--class", "MissCapulet", "--kind", "strict"],
        ["--node", "Juliet", "--class", "MissCapulet", "--kind", "sideways"],
    ],
)
def test_member_usage_errors(capsys, args):
    status, _, _ = run(capsys, "member", FIG["fig1.og"], FIG["fig2.cg"], *args)
    assert status == 2


def test_check_full(capsys, tmp_path):
    report = tmp_path / "out.json"
    status, out, _ = run(capsys, "check", FIG["fig1.og"], FIG["fig2.cg"], "--mode", "full", "--report", str(report))
    assert status == 0
    assert out == "compliant (full)\nwitness:\n  Juliet -> MissCapulet\n  Romeo -> MrMontague\n  Tybalt -> Capulet\n"
    data = json.loads(report.read_text())
    jsonschema.validate(data, REPORT_SCHEMA)
    assert data["compliant"] is True and data["mode"] == "full"


def test_check_normal_uncovered_class(capsys, tmp_path):
    report = tmp_path / "out.json"
    status, out, _ = run(capsys, "check", FIG["fig3.og"], FIG["fig2.cg"], "--mode", "normal", "--report", str(report))
    assert status == 1
    assert "uncovered class: Capulet" in out
    jsonschema.validate(json.loads(report.read_text()), REPORT_SCHEMA)


def test_check_full_uncovered_node(capsys):
    status, out, _ = run(capsys, "check", FIG["fig3.og"], FIG["fig4.cg"], "--mode", "full")
    assert status == 1
    assert out == "not compliant (full)\nuncovered node: Mercutio\n"


def test_check_defaults_to_normal(capsys):
    status, out, _ = run(capsys, "check", FIG["fig3.og"], FIG["fig4.cg"])
    assert status == 0 and out.startswith("compliant (normal)")


def test_check_all_witnesses(capsys):
    status, out, _ = run(capsys, "check", FIG["fig1.og"], FIG["fig2.cg"], "--all")
    assert status == 0 and "witness 1:" in out and "witness 2:" not in out


def test_check_budget(capsys, monkeypatch):
    status, out, _ = run(capsys, "check", FIG["fig1.og"], FIG["fig2.cg"], "--budget", "1")
    assert status == 3 and out.startswith("undecided")
    monkeypatch.setenv("GRAPHCOMPLY_BUDGET", "1")
    assert run(capsys, "check", FIG["fig1.og"], FIG["fig2.cg"])[0] == 3
    monkeypatch.setenv("GRAPHCOMPLY_BUDGET", "zero")
    assert run(capsys, "check", FIG["fig1.og"], FIG["fig2.cg"])[0] == 2


def test_check_parse_failure(tmp_path, capsys):
    broken = tmp_path / "broken.cg"
    broken.write_text("schema s { class C { house: = } }")
    status, _, err = run(capsys, "check", FIG["fig1.og"], str(broken))
    assert status == 2 and "SyntaxError" not in err and ":1:31: error:" in err


def test_check_swapped_arguments(capsys):
    assert run(capsys, "check", FIG["fig2.cg"], FIG["fig1.og"])[0] == 2


def test_no_command(capsys):
    assert run(capsys)[0] == 2


def test_version(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_stdout_is_byte_stable():
    cmd = [sys.executable, "-m", "graphcomply", "check", FIG["fig3.og"], FIG["fig2.cg"], "--mode", "full"]
    first = subprocess.run(cmd, capture_output=True)
    second = subprocess.run(cmd, capture_output=True)
    assert first.returncode == second.returncode == 1
    assert first.stdout == second.stdout and first.stdout
