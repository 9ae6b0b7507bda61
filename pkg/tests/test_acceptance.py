"""Acceptance suite: one test per criterion, each printing a pass/fail line."""
import pytest

from expvol.acceptance import CRITERIA, run_one

# collected for the terminal summary in conftest.py
LINES: dict[int, str] = {}


@pytest.mark.parametrize("number", [c[0] for c in CRITERIA],
                         ids=[f"criterion_{c[0]:02d}" for c in CRITERIA])
def test_criterion(number):
    r = run_one(number)
    LINES[number] = r.line()
    print(r.line())
    assert r.passed, r.line()
