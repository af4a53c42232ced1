"""Seeded corpus runs: one invariant suite per mode, replayable by seed."""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import testkit
from ._validation import rel
from .ep import characterization_battery
from .exceptions import CriterionMismatch, WpinvError
from .geninv import pinv_from_projectors, projectors_of, weighted_pinv
from .hermitian import is_banach_hermitian
from .linalg import norm2
from .structure import BlockModel, lift_gap, quotient_gaps, restriction_gaps

MODES = ("ep-battery", "uniqueness", "lift", "blocks", "hermitian")

# pass thresholds per mode
UNIQUENESS_TOL = 1e-9
LIFT_TOL = 1e-8
BLOCK_TOL = 1e-8
SQRT_BLOCK_TOL = 1e-10


@dataclass(frozen=True)
class InstanceResult:
    index: int
    seed: int
    n: int
    passed: bool
    residual: float
    detail: str = ""


def _ep_battery(n, seed, index):
    constructed = index % 2 == 0
    A, E, F = testkit.ep_corpus_instance(n, seed, constructed)
    rep = characterization_battery(A, E, F)
    ok = rep.consensus != "mixed" and rep.ep_verdict == constructed
    detail = rep.consensus if ok else f"{rep.consensus}: {','.join(rep.disagreeing)}"
    return ok, rep.worst_true_residual, detail


def _uniqueness(n, seed, index):
    A, E, F = testkit.penrose_instance(n, seed)
    B = weighted_pinv(A, E, F).B
    P, Q = projectors_of(A, E, F)
    S = pinv_from_projectors(A, P, Q)
    gap = rel(norm2(S - B), norm2(B))
    return gap <= UNIQUENESS_TOL, gap, ""


def _lift(n, seed, index):
    A, E, F = testkit.penrose_instance(n, seed, max_cond=1e3, max_weight_cond=1e2)
    gap = lift_gap(A, E, F)
    return gap <= LIFT_TOL, gap, ""


def _blocks(n, seed, index):
    T, E, F, k = testkit.block_instance(max(n, 2), seed)
    models = [BlockModel.from_matrix(M, k) for M in (T, E, F)]
    r_inv, r_sqrt = restriction_gaps(*models)
    q_inv, q_sqrt = quotient_gaps(*models)
    ok = max(r_inv, q_inv) <= BLOCK_TOL and max(r_sqrt, q_sqrt) <= SQRT_BLOCK_TOL
    return ok, max(r_inv, q_inv), f"sqrt gap {max(r_sqrt, q_sqrt):.1e}"


def _hermitian(n, seed, index):
    constructed = index % 2 == 0
    A = testkit.hermitian_instance(n, seed, constructed)
    try:
        rep = is_banach_hermitian(A)
    except CriterionMismatch as exc:
        return False, np.inf, str(exc)
    return rep.verdict == constructed, rep.max_deviation if constructed else 0.0, ""


_RUNNERS = {
    "ep-battery": _ep_battery,
    "uniqueness": _uniqueness,
    "lift": _lift,
    "blocks": _blocks,
    "hermitian": _hermitian,
}


def run_instance(mode, n, seed, index):
    """Run one corpus instance; the instance is fully determined by its arguments."""
    iseed = testkit.instance_seed(seed, index)
    try:
        ok, residual, detail = _RUNNERS[mode](n, iseed, index)
    except WpinvError as exc:
        ok, residual, detail = False, np.inf, f"{type(exc).__name__}: {exc}"
    return InstanceResult(index, seed, n, bool(ok), float(residual), detail)


@dataclass
class CorpusSummary:
    mode: str
    n: int
    seed: int
    count: int
    passed: int = 0
    failed: int = 0
    worst_residual: float = 0.0
    failures: list = field(default_factory=list)

    @property
    def ok(self):
        return self.failed == 0

    def to_dict(self):
        return {
            "mode": self.mode,
            "n": self.n,
            "seed": self.seed,
            "count": self.count,
            "passed": self.passed,
            "failed": self.failed,
            "worst_residual": self.worst_residual,
            "failures": self.failures,
        }


def run_corpus(mode, n, count, seed, indices=None):
    if mode not in _RUNNERS:
        raise ValueError(f"unknown corpus mode {mode!r}; choose from {MODES}")
    summary = CorpusSummary(mode, n, seed, count)
    for index in range(count) if indices is None else indices:
        res = run_instance(mode, n, seed, index)
        if res.passed:
            summary.passed += 1
            if np.isfinite(res.residual):
                summary.worst_residual = max(summary.worst_residual, res.residual)
        else:
            summary.failed += 1
            summary.failures.append(
                {"mode": mode, "n": n, "seed": seed, "index": index, "detail": res.detail}
            )
    return summary


def write_manifest(path, summary):
    Path(path).write_text(json.dumps({"failures": summary.failures}, indent=2) + "\n")


def replay_manifest(path):
    """Re-run every failing instance recorded in a manifest."""
    entries = json.loads(Path(path).read_text())["failures"]
    return [run_instance(e["mode"], e["n"], e["seed"], e["index"]) for e in entries]
