"""Acceptance gate: every criterion at its stated tolerance.

All checks are exact (zero tolerance on rational equalities and
inequalities); each criterion prints one PASS/FAIL line and must also
finish inside its runtime budget.  Run with ``pytest -s`` to see the
lines, or ``tsirkit suite`` for the CLI equivalent.
"""

import pytest

from tsirkit.suite import CRITERIA, TIME_LIMITS


@pytest.mark.parametrize("number", list(CRITERIA), ids=lambda n: f"A{n}")
def test_criterion(number):
    result = CRITERIA[number](seed=0)
    print(result.line())
    assert result.passed, result.details
    assert result.seconds < TIME_LIMITS[number], (
        f"{result.name} took {result.seconds:.1f}s, budget {TIME_LIMITS[number]}s"
    )
