from __future__ import annotations

import os

import pytest

# Acceptance lines collected by test_acceptance.py, printed after the run.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("]")[1].split(".")[0])):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def bank():
    from groovesolve.kernel import default_bank
    return default_bank()


@pytest.fixture(scope="session")
def solved_005():
    from groovesolve.acceptance import converged
    return converged(0.05)[0]


@pytest.fixture
def clean_env(monkeypatch):
    for key in ("GROOVESOLVE_THREADS", "GROOVESOLVE_BACKEND", "GROOVESOLVE_KERNEL_CACHE"):
        monkeypatch.delenv(key, raising=False)
    return os.environ
