"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run directly (``python tests/test_acceptance.py``) for the bare summary, or
through pytest, where the lines are also repeated in the terminal summary.
"""

import pytest

from coherent_constraints.acceptance import CRITERIA, FULL, run_criterion

SUMMARY: dict = {}


@pytest.mark.parametrize("number", sorted(CRITERIA), ids=lambda n: f"criterion_{n:02d}")
def test_criterion(number):
    result = run_criterion(number, FULL)
    line = result.summary()
    SUMMARY[number] = line
    print(line)
    failing = [(r.quantity, r.residual, r.tolerance) for r in result.rows if not r.passed]
    assert result.passed, failing


def test_every_criterion_reported():
    assert len(CRITERIA) == 12


if __name__ == "__main__":
    import sys

    results = [run_criterion(n, FULL) for n in sorted(CRITERIA)]
    for res in results:
        print(res.summary())
    sys.exit(0 if all(r.passed for r in results) else 1)
