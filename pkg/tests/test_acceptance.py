"""Runs the fifteen acceptance criteria; one PASS/FAIL line per criterion.

Usable as ``pytest tests/test_acceptance.py`` or ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import sys

import pytest

from groovesolve.acceptance import CRITERIA, run_all, run_criterion

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script from another directory
    ACCEPTANCE_LINES = []


@pytest.mark.slow
@pytest.mark.parametrize("number", [c[0] for c in CRITERIA], ids=[f"c{c[0]:02d}" for c in CRITERIA])
def test_criterion(number):
    result = run_criterion(number)
    ACCEPTANCE_LINES.append(result.line())
    print(result.line())
    assert result.passed, result.line()


if __name__ == "__main__":
    results = run_all(stream=sys.stdout)
    sys.exit(0 if all(r.passed for r in results) else 1)
