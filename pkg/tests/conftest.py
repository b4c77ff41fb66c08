"""Shared fixtures and the acceptance summary printed after the run."""
from __future__ import annotations

import numpy as np
import pytest

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(number, passed, detail):
    line = f"{'PASS' if passed else 'FAIL'}  criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
