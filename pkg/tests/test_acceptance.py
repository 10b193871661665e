"""Acceptance suite: one PASS/FAIL line per numbered criterion.

Run directly (``python tests/test_acceptance.py``) for a scoreboard, or
through pytest, which prints each line as the criterion completes.
"""
import pytest

from hnkit import acceptance

TITLES = {
    1: "constant-i reproduction, n = 1, 2, 3",
    2: "closed-form match and three-variable recovery",
    3: "kernel identity",
    4: "condition discrimination",
    5: "form equivalence",
    6: "recovery round trip",
    7: "Stieltjes inversion",
    8: "symmetry formulas",
    9: "upper-coordinate independence",
    10: "Herglotz positivity",
}


@pytest.mark.slow
@pytest.mark.parametrize("number", sorted(TITLES), ids=lambda k: f"criterion_{k:02d}")
def test_criterion(number, capsys):
    res = acceptance.run(number)
    with capsys.disabled():
        print(f"\n{res.line()}")
        for key, val in res.details.items():
            print(f"      {key}: {val}")
    assert res.passed, res.details


if __name__ == "__main__":
    import sys

    results = acceptance.run_all(echo=print)
    print(acceptance.scoreboard(results).splitlines()[-1])
    sys.exit(0 if all(r.passed for r in results) else 1)
