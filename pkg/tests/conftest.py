import re

import pytest

from seqscan import TestSpec, TunedParams, bounded_table, minimax_tune
from seqscan.triple import TripleSpec, build_triple_plan

_CRITERION = re.compile(r"test_acceptance\.py::test_c(\d+)_")
_acceptance = {}


@pytest.fixture(scope="session")
def fig1():
    """The small symmetric configuration: (0.2, 0.8), zeta = 1, a = b = 0.1."""
    spec = TestSpec(0.2, 0.8, 0.1, 0.1)
    params = TunedParams(0.1, 0.1, 1.0)
    table = bounded_table(spec, params)
    return spec, params, table, table.to_plan()


@pytest.fixture(scope="session")
def narrow_spec():
    return TestSpec(0.1, 0.15, 0.1, 0.1)


@pytest.fixture(scope="session")
def narrow_tuned(narrow_spec):
    params, diag = minimax_tune(narrow_spec, 20)
    return params, diag


@pytest.fixture(scope="session")
def triple_worked():
    spec = TripleSpec.symmetric(1 / 3, 2 / 3, 1 / 9, 0.1)
    plan, diag = build_triple_plan(spec)
    return spec, plan, diag


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    crit = int(m.group(1))
    if report.when == "call" or report.outcome != "passed":
        prev = _acceptance.get(crit, "PASS")
        _acceptance[crit] = "PASS" if prev == "PASS" and report.outcome == "passed" else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_acceptance):
        terminalreporter.write_line(f"criterion {crit}: {_acceptance[crit]}")
