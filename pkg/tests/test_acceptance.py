"""Acceptance suite: one test per criterion, each printing a pass/fail line."""

import pytest

from sglattice import verify
from sglattice.cli import _cli_classification_runner

OPTIONS = verify.Options()


@pytest.mark.parametrize("number", range(1, len(verify.CHECKS) + 1))
def test_criterion(number):
    kwargs = {"runner": _cli_classification_runner} if number == 10 else {}
    result = verify.run_check(number, OPTIONS, **kwargs)
    print(result.line())
    assert result.passed, result.line()
    _, budget = verify.CHECKS[number - 1]
    if budget is not None:
        assert result.seconds <= budget
