"""Acceptance criteria, one test each, run at their stated tolerances.

Run with ``pytest -s tests/test_acceptance.py`` to see the PASS/FAIL lines.
"""

import pytest

from toricgh import acceptance


@pytest.mark.slow
@pytest.mark.parametrize("number", sorted(acceptance.CRITERIA))
def test_criterion(number, capsys):
    res = acceptance.CRITERIA[number]()
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.line()
