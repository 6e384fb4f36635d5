"""Acceptance gate: every verification criterion must hold at its stated tolerance.

Run with -v to get one pass/fail line per criterion.
"""

import pytest

from hamsys import verify

CRITERIA = [
    (1, "legendre-reproduction"),
    (2, "dirac-chain"),
    (3, "dirac-brackets"),
    (4, "hj-closure"),
    (5, "fc-embedding"),
    (6, "gauged-roundtrip"),
    (7, "brst-structure"),
    (8, "rk4-numerics"),
    (9, "property-suites"),
    (10, "discrepancy-ledger"),
]


@pytest.fixture(scope="module")
def results():
    # one shared run: the criteria are read-only once computed
    found = verify.run_all()
    return {r.number: r for r in found}


def test_every_criterion_is_reported(results):
    assert sorted(results) == [n for n, _ in CRITERIA]
    for number, name in CRITERIA:
        assert results[number].name == name


@pytest.mark.parametrize(("number", "name"), CRITERIA, ids=[name for _, name in CRITERIA])
def test_criterion(results, number, name):
    result = results[number]
    assert result.passed, f"criterion {number} ({name}) failed:\n{result.details}"


def test_all_criteria_pass(results):
    ordered = [results[n] for n, _ in CRITERIA]
    summary = "\n".join(verify.format_lines(ordered))
    assert all(r.passed for r in ordered), f"acceptance summary:\n{summary}"
