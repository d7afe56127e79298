"""Acceptance criteria, one test per criterion.

Each test runs the named verification suite at the tolerances stored in the
versioned defaults file, prints a single PASS/FAIL line and asserts on it.
"""

import time

import pytest

from boxball.harness import scenarios

SEED = 1

CRITERIA = {
    1: ("figure1", "Figure 1 rows reproduced bit-exactly", 1.0),
    2: ("conservation", "soliton profile conserved, exhaustive N <= 12 and 10^4 random N <= 64", 30.0),
    3: ("gibbs-invariance", "enumerated Gibbs laws T-invariant to TV < 1e-12", 90.0),
    4: ("reversibility", "inverse transform undoes T exhaustively for N <= 12", None),
    5: ("limits", "window marginals converge, TV < 1e-3 at N = 2000", 60.0),
    6: ("high-density", "p = 0.6 window collapses to fair coins, TV < 1e-2", 30.0),
    7: ("carrier-marginals", "carrier closed forms, chi-square at 10^6 samples", None),
    8: ("quasistationary", "eigen-residual, detailed balance, carrier bound, density", None),
    9: ("toda-bridge", "min-plus Toda equals the path route exactly", None),
    10: ("toda-measures", "Toda invariant measures after one step", 300.0),
    11: ("zigzag", "zigzag sojourns after T and carrier atom/mean", None),
    12: ("scaling", "rescaled walk marginal and Markov sojourns", None),
    13: ("section5", "one-sided conditioned processes agree", None),
    14: ("palm", "discrete and continuous Palm laws T-invariant", None),
}

_cache: dict = {}


def run_criterion(number: int):
    if number not in _cache:
        suite = CRITERIA[number][0]
        t0 = time.perf_counter()
        checks = scenarios.run_suite(suite, seed=SEED)
        _cache[number] = (checks, time.perf_counter() - t0)
    return _cache[number]


def report(capsys, number: int, passed: bool, elapsed: float, failing: list[str]) -> None:
    suite, text, _ = CRITERIA[number]
    tail = f" [failing: {', '.join(failing)}]" if failing else ""
    with capsys.disabled():
        print(f"\n{'PASS' if passed else 'FAIL'} criterion {number:>2} ({suite}): {text}; {elapsed:.1f}s{tail}")


def judge(capsys, number: int) -> bool:
    checks, elapsed = run_criterion(number)
    limit = CRITERIA[number][2]
    failing = [c.name for c in checks if not c.passed]
    if limit is not None and elapsed > limit:
        failing.append(f"time>{limit:g}s")
    passed = not failing
    report(capsys, number, passed, elapsed, failing)
    return passed


@pytest.mark.parametrize("number", [n for n in CRITERIA if n != 10])
def test_criterion(capsys, number):
    assert judge(capsys, number)


# The integer part of criterion 10 asks that the multinomial law with equal
# cell probabilities be invariant.  Exact enumeration shows it is not (see
# test_toda.py), so this criterion fails and is expected to.
@pytest.mark.xfail(strict=True, reason="multinomial integer law is not invariant under the periodic step")
def test_criterion_10(capsys):
    assert judge(capsys, 10)


def test_criterion_10_other_parts():
    checks, _ = run_criterion(10)
    by_name = {c.name: c for c in checks}
    for name in ("toda-palm-Q1", "toda-palm-E1", "toda-palm-Q0", "toda-palm-E0",
                 "toda-dirichlet-Q1", "toda-integer-Q1-uniform", "toda-integer-exact"):
        assert by_name[name].passed, by_name[name].line()
    assert not by_name["toda-integer-Q1-binomial"].passed
