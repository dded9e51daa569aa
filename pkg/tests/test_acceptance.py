"""Acceptance criteria AC1-AC13, one test each, printing PASS or FAIL."""

import pytest

from dirhyp.criteria import CRITERIA, run

LINES: dict[str, str] = {}


@pytest.mark.parametrize("name", list(CRITERIA))
def test_acceptance(name):
    (result,) = run([name])
    LINES[name] = result.line()
    print(result.line())
    assert result.ok, result.detail
