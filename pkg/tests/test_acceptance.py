"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line; the lines are printed in the pytest
terminal summary (see conftest.py) and when this file runs as a script.
"""

import time

import numpy as np
import pytest
import scipy.linalg

from wpinv.ep import (
    characterization_battery,
    invertible_factor_witness,
    spectral_pinv_witness,
)
from wpinv.exceptions import Defective
from wpinv.geninv import pinv_from_projectors, projectors_of, weighted_pinv
from wpinv.hermitian import is_banach_hermitian
from wpinv.linalg import norm2, svd_pinv
from wpinv.structure import BlockModel, lift_gap, quotient_gaps, restriction_gaps
from wpinv.testkit import (
    block_instance,
    ep_corpus_instance,
    hermitian_instance,
    instance_seed,
    oracle_penrose_solve_2x2,
    penrose_instance,
)

RESULTS = {}
SEED = 20240601


def record(number, ok, detail):
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[number] = line
    print(line)
    return ok


def rel(err, ref):
    return err / ref if ref > 0 else err


def gap(X, Y):
    return rel(norm2(X - Y), norm2(Y))


@pytest.fixture(scope="module")
def penrose_corpus():
    # n cycles through 2..8; rank, conditioning and weights are drawn per seed
    return [penrose_instance(2 + i % 7, instance_seed(SEED, i)) for i in range(1000)]


def test_criterion_01_penrose_residuals(penrose_corpus):
    t0 = time.perf_counter()
    worst = 0.0
    for A, E, F in penrose_corpus:
        res = weighted_pinv(A, E, F, verify_tol=1.0)
        worst = max(worst, max(res.residuals))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-8 and elapsed < 10
    assert record(1, ok, f"worst residual {worst:.2e} (<= 1e-8), {elapsed:.2f} s (< 10 s)")


def test_criterion_02_uniqueness(penrose_corpus):
    worst = 0.0
    for A, E, F in penrose_corpus:
        B = weighted_pinv(A, E, F).B
        S = pinv_from_projectors(A, *projectors_of(A, E, F))
        worst = max(worst, gap(S, B))
    assert record(2, worst <= 1e-9, f"max formula/projector gap {worst:.2e} (<= 1e-9)")


def test_criterion_03_weight_involution(penrose_corpus):
    worst = 0.0
    for A, E, F in penrose_corpus:
        B = weighted_pinv(A, E, F).B
        worst = max(worst, gap(weighted_pinv(B, F, E).B, A))
    assert record(3, worst <= 1e-9, f"max |(A+_EF)+_FE - A|/|A| {worst:.2e} (<= 1e-9)")


def test_criterion_04_reduction(penrose_corpus):
    worst_unit = worst_equal = 0.0
    for A, E, _ in penrose_corpus:
        worst_unit = max(worst_unit, gap(weighted_pinv(A).B, svd_pinv(A)))
        # reference built from scipy's square root and numpy's pseudoinverse
        R = scipy.linalg.sqrtm(E.W)
        Rinv = np.linalg.inv(R)
        ref = Rinv @ np.linalg.pinv(R @ A @ Rinv, rcond=1e-10) @ R
        worst_equal = max(worst_equal, gap(weighted_pinv(A, E, E).B, ref))
    ok = worst_unit <= 1e-11 and worst_equal <= 1e-9
    assert record(
        4, ok, f"unit weights {worst_unit:.2e} (<= 1e-11), equal weights {worst_equal:.2e} (<= 1e-9)"
    )


def test_criterion_05_lift():
    t0 = time.perf_counter()
    worst = 0.0
    for i in range(200):
        A, E, F = penrose_instance(2 + i % 5, instance_seed(SEED + 5, i))
        worst = max(worst, lift_gap(A, E, F))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-8 and elapsed < 30
    assert record(5, ok, f"200 instances n <= 6, max gap {worst:.2e} (<= 1e-8), {elapsed:.2f} s (< 30 s)")


def test_criterion_06_blocks():
    worst_inv = worst_sqrt = 0.0
    for i in range(200):
        T, E, F, k = block_instance(2 + i % 7, instance_seed(SEED + 6, i))
        models = [BlockModel.from_matrix(M, k) for M in (T, E, F)]
        for inv_gap, sqrt_gap in (restriction_gaps(*models), quotient_gaps(*models)):
            worst_inv = max(worst_inv, inv_gap)
            worst_sqrt = max(worst_sqrt, sqrt_gap)
    ok = worst_inv <= 1e-8 and worst_sqrt <= 1e-10
    assert record(
        6, ok, f"200 instances n <= 8, inverse gap {worst_inv:.2e} (<= 1e-8), sqrt gap {worst_sqrt:.2e} (<= 1e-10)"
    )


@pytest.fixture(scope="module")
def ep_corpus():
    constructed = [ep_corpus_instance(2 + i % 5, instance_seed(SEED + 7, i), True) for i in range(500)]
    generic = [ep_corpus_instance(2 + i % 5, instance_seed(SEED + 8, i), False) for i in range(500)]
    return constructed, generic


def test_criterion_07_clause_consensus(ep_corpus):
    constructed, generic = ep_corpus
    t0 = time.perf_counter()
    mixed = mismatched = wrong = 0
    margin_true, margin_false = 0.0, np.inf
    for expected, corpus in ((True, constructed), (False, generic)):
        for A, E, F in corpus:
            rep = characterization_battery(A, E, F)
            mixed += rep.consensus == "mixed"
            mismatched += rep.ep_verdict != (rep.consensus == "all-true")
            wrong += rep.ep_verdict != expected
            margin_true = max(margin_true, rep.worst_true_residual)
            margin_false = min(margin_false, rep.min_false_residual)
    elapsed = time.perf_counter() - t0
    ok = mixed == 0 and mismatched == 0 and wrong == 0 and elapsed < 60
    assert record(
        7,
        ok,
        f"mixed {mixed}/1000, verdict mismatches {mismatched}, misclassified {wrong}, "
        f"worst true residual {margin_true:.1e}, smallest false residual {margin_false:.1e}, "
        f"{elapsed:.1f} s (< 60 s)",
    )


def test_criterion_08_witnesses(ep_corpus):
    constructed, _ = ep_corpus
    checked = skipped = failed = 0
    worst_identity = 0.0
    for A, E, F in constructed:
        try:
            spectral_pinv_witness(A, E, F, tol=1e-7)
        except Defective:
            skipped += 1
            continue
        except Exception:
            failed += 1
            continue
        try:
            invertible_factor_witness(A, E, F, tol=1e-8)
        except Exception:
            failed += 1
            continue
        # explicit identity A = (A^2 + I - A+A) A+
        B = weighted_pinv(A, E, F).B
        n = A.shape[0]
        U = A @ A + np.eye(n) - B @ A
        worst_identity = max(worst_identity, rel(norm2(A - U @ B), norm2(U) * norm2(B)))
        checked += 1
    ok = failed == 0 and checked > 0 and worst_identity <= 1e-8
    assert record(
        8,
        ok,
        f"{checked} diagonalizable instances, {failed} failures, {skipped} defective skipped, "
        f"max |A - (A^2+I-BA)B| {worst_identity:.1e}",
    )


def test_criterion_09_hermiticity():
    disagreements = 0
    for i in range(1000):
        A = hermitian_instance(1 + i % 6, instance_seed(SEED + 9, i), i < 500)
        verdict = is_banach_hermitian(A, "2").verdict
        exact = np.linalg.norm(A - A.conj().T, 2) <= 1e-8 * np.linalg.norm(A, 2)
        disagreements += verdict != exact
    J = np.array([[0.0, 1.0], [0.0, 0.0]])
    dev = is_banach_hermitian(J, "2").deviation_at(1.0)
    target = (1 + np.sqrt(5)) / 2 - 1
    ok = disagreements == 0 and abs(dev - target) <= 1e-6
    assert record(
        9, ok, f"grid/exact disagreements {disagreements}/1000, Jordan deviation at t=1 {dev:.12f} vs {target:.12f}"
    )


def test_criterion_10_hand_values():
    A0 = np.array([[1.0, 0.0], [0.0, 0.0]])
    E0 = np.array([[2.0, 1.0], [1.0, 1.0]])
    B0 = np.array([[1.0, 0.5], [0.0, 0.0]])
    J = np.array([[0.0, 1.0], [0.0, 0.0]])
    I = np.eye(2)
    cases = [
        ("A=diag(1,0), E=[[2,1],[1,1]], F=I", A0, E0, I, B0),
        ("A=J, E=diag(1,4), F=diag(9,1)", J, np.diag([1.0, 4.0]), np.diag([9.0, 1.0]), J.T),
        ("A=[[1,1/2],[0,0]], E=I, F=[[2,1],[1,1]]", B0, I, E0, A0),
    ]
    worst = 0.0
    for _, A, E, F, expected in cases:
        worst = max(
            worst,
            np.abs(weighted_pinv(A, E, F).B - expected).max(),
            np.abs(oracle_penrose_solve_2x2(A, E, F) - expected).max(),
        )
    assert record(10, worst <= 1e-12, f"3 closed forms, max entry error {worst:.1e} (<= 1e-12), oracle confirmed")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
