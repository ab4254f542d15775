"""Acceptance suite: one test per quantitative criterion.

Each test prints its pass/fail line (visible with ``pytest -s`` or via
``loewner verify``) and asserts the criterion at its stated tolerance.
"""

import pytest

from loewner.acceptance import CRITERIA


@pytest.mark.parametrize(
    "number,name,fn", CRITERIA, ids=[f"{n:02d}-{name}" for n, name, _ in CRITERIA]
)
def test_criterion(number, name, fn, capsys):
    res = fn()
    line = f"[{'PASS' if res.passed else 'FAIL'}] {res.number:2d} {name}: {res.detail} ({res.seconds:.1f}s)"
    with capsys.disabled():
        print(line)
    assert res.passed, line
