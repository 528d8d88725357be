"""Acceptance battery: one test per criterion, each printing a PASS/FAIL line.

Values are computed through the public API and the same check functions the
``verify-paper`` command uses, at the stated tolerances.
"""
import math

import numpy as np
import pytest

from jbtriple import (
    L_op, Rectangular, build_space, build_T_operator, jordan_multiplication, left_multiplication,
    numerical_radius, operator_norm, right_multiplication,
)
from jbtriple import verify

SEED = 7


def report(capsys, k, checks):
    ok = all(c.passed for c in checks)
    with capsys.disabled():
        print()
        for c in checks:
            print(f"{'PASS' if c.passed else 'FAIL'} criterion {k}: {c.name}: "
                  f"got {c.got} expected {c.expected}")
    return ok


def _m2():
    s = build_space(Rectangular(2, 2))
    return s, s.from_matrix([[0, 1], [0, 0]]), s.from_matrix(np.eye(2))


def test_criterion_1_nilpotent_multiplication(capsys):
    s, b, one = _m2()
    v = numerical_radius(jordan_multiplication(b, one), seed=SEED).value
    checks = verify.criterion_1(SEED)
    assert report(capsys, 1, checks)
    assert 0.49 <= v <= 0.51


def test_criterion_2_one_sided_multiplications(capsys):
    s, b, _ = _m2()
    vl = numerical_radius(left_multiplication(b), seed=SEED).value
    vr = numerical_radius(right_multiplication(b), seed=SEED).value
    vh = numerical_radius(right_multiplication(0.5 * b), seed=SEED).value
    assert report(capsys, 2, verify.criterion_2(SEED))
    assert 0.49 <= vl <= 0.51 and 0.49 <= vr <= 0.51 and 0.24 <= vh <= 0.26


def test_criterion_3_L_b_e(capsys):
    s, b, one = _m2()
    T = L_op(b, one)
    assert report(capsys, 3, verify.criterion_3(SEED))
    assert 0.99 <= operator_norm(T, seed=SEED).value <= 1.01
    assert 0.49 <= numerical_radius(T, seed=SEED).value <= 0.51


def test_criterion_4_T_operator(capsys):
    s, b, one = _m2()
    t = build_T_operator(one, b)
    assert report(capsys, 4, verify.criterion_4(SEED))
    assert 0.99 <= operator_norm(t.operator, seed=SEED).value <= 1.01
    assert 0.49 <= numerical_radius(t.operator, seed=SEED).value <= 0.51


@pytest.fixture(scope="module")
def index_cache():
    cache = {}
    c5 = verify.criterion_5(SEED, _cache=cache)
    c6 = verify.criterion_6(SEED, _cache=cache)
    return cache, c5, c6


def test_criterion_5_commutative_index_one(capsys, index_cache):
    cache, c5, _ = index_cache
    assert report(capsys, 5, c5)
    for n in (2, 4):
        est = cache[f"Diagonal({n})"]
        assert len([s for s in est.samples if s["name"].startswith("random")]) == 50
        assert est.value >= 0.97


def test_criterion_6_noncommutative_index_half(capsys, index_cache):
    cache, _, c6 = index_cache
    assert report(capsys, 6, c6)
    for label in ("M2", "Symmetric(2)", "Diagonal(1) + M2"):
        assert cache[label].value <= 0.51
        assert cache[label].witness_name.startswith("nilpotent")


def test_criterion_7_ratio_floor(capsys, index_cache):
    cache, _, _ = index_cache
    checks = verify.criterion_7(SEED, _cache=cache)
    assert report(capsys, 7, checks)
    ratios = [s["ratio"] for est in cache.values() for s in est.samples]
    assert min(ratios) >= 1 / math.e - 0.02


def test_criterion_8_characterization_consistency(capsys):
    checks = verify.criterion_8(SEED)
    assert len(checks) == len(verify.REPORT_SPECS) + 1
    assert report(capsys, 8, checks)


def test_criterion_9_algebraic_invariants(capsys):
    checks = verify.criterion_9(SEED, n_samples=100)
    assert len(checks) == 7 * len(verify.INVARIANT_SPECS)
    assert report(capsys, 9, checks)


def test_criterion_10_oracle_equivalences(capsys):
    checks = verify.criterion_10(SEED, n_pairs=1000)
    assert [c.tol for c in checks] == [1e-5, 1e-8, 1e-6]
    assert report(capsys, 10, checks)
