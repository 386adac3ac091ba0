from pathlib import Path

import pytest

from graphcomply.graphtext import parse_class_graph, parse_object_graph
from graphcomply.membership import make_context

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load(name: str):
    path = FIXTURES / name
    parse = parse_object_graph if path.suffix == ".og" else parse_class_graph
    result = parse(path.read_text(encoding="utf-8"), str(path))
    assert result.ok, [str(d) for d in result.diagnostics]
    return result.value


@pytest.fixture(scope="session")
def fig1():
    return load("fig1.og")


@pytest.fixture(scope="session")
def fig2():
    return load("fig2.cg")


@pytest.fixture(scope="session")
def fig3():
    return load("fig3.og")


@pytest.fixture(scope="session")
def fig4():
    return load("fig4.cg")


@pytest.fixture
def ctx12(fig1, fig2):
    return make_context(fig1, fig2)


# Acceptance criteria append (name, passed, detail) here; the summary below
# prints one line per criterion at the end of the run.
ACCEPTANCE: list = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE:
        line = f"{'PASS' if passed else 'FAIL'}  {name}"
        terminalreporter.write_line(line + (f"  ({detail})" if detail else ""))
