"""Shared fixtures and the acceptance-criteria terminal summary.

Acceptance tests attach a line via record_property("acceptance", text);
the summary hook prints each with its final PASS/FAIL status so the
criteria are readable in one block at the end of a pytest run.
"""

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import oracles
from omegashift.experiment import resolve_w
from omegashift.sieve import SieveConfig, build_omega_table

_ACCEPTANCE: list[tuple[bool, str]] = []


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    for name, value in report.user_properties:
        if name == "acceptance":
            _ACCEPTANCE.append((report.passed, str(value)))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for passed, line in _ACCEPTANCE:
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {line}")


X_ORACLE = 100_000


@pytest.fixture(scope="session")
def oracle_w():
    return resolve_w("loglog_sq", X_ORACLE)


@pytest.fixture(scope="session")
def oracle_triples(oracle_w):
    """(omega(n), omega(n-1), omega(n-1,w)) for n in [2, 1e5] by trial division."""
    return oracles.level_triples(X_ORACLE, oracle_w)


@pytest.fixture(scope="session")
def table_1e5(oracle_w):
    return build_omega_table(SieveConfig(x_max=X_ORACLE, w=oracle_w))
