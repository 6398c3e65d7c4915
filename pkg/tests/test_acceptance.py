"""The eleven acceptance criteria; one PASS/FAIL line each is printed after the run.

Run directly (``python tests/test_acceptance.py``) to print the table without pytest.
"""

import pytest

from tanaka_kit.acceptance import CRITERIA, run_criterion

RESULTS = {}


@pytest.mark.parametrize("number", sorted(CRITERIA), ids=lambda n: f"criterion_{n:02d}")
def test_criterion(number):
    r = run_criterion(number)
    RESULTS[number] = r
    print(r.line())
    assert r.ok, "\n".join(d for d in r.details if d.startswith("BAD"))


if __name__ == "__main__":
    import sys
    results = [run_criterion(n) for n in sorted(CRITERIA)]
    for r in results:
        print(r.line())
    sys.exit(0 if all(r.ok for r in results) else 1)
