"""Command-line interface.

Every command prints a JSON run report (and writes it to ``--out`` when
given), also when it fails. Exit codes:

0  all verdicts and residuals within tolerance
1  a check or corpus instance failed
2  input could not be parsed
3  a verification step failed
4  a weight is not hermitian positive definite
5  mixed clause consensus or a hermiticity criterion mismatch
6  a block hypothesis (invariance) does not hold
"""

import argparse
import os
import sys

import numpy as np

from . import corpus
from ._validation import rel
from .ep import ClauseParams, characterization_battery, is_weighted_ep
from .exceptions import (
    CriterionMismatch,
    DimensionMismatch,
    NotHermitian,
    NotInvariant,
    NotPositiveDefinite,
    PreconditionUnmet,
    VerificationFailure,
    WpinvError,
)
from .geninv import (
    Weight,
    as_weight,
    group_inverse,
    penrose_residuals,
    pinv_from_projectors,
    projectors_of,
    weighted_pinv,
)
from .hermitian import DEFAULT_STEPS, DEFAULT_T_MAX, is_banach_hermitian
from .io import MatrixParseError, RunReport, digest, matrix_to_dict, read_matrix, write_matrix
from .linalg import norm2
from .structure import BlockModel, lift_gap, quotient_gaps, restriction_gaps

KERNEL_TOL = 1e-10
VERDICT_TOL = 1e-8
UNIQUE_TOL = 1e-9
TOL_ENV = "WPINV_DEFAULT_TOL"

EXIT_OK, EXIT_CHECK, EXIT_PARSE, EXIT_VERIFY, EXIT_WEIGHT, EXIT_MIXED, EXIT_INVARIANT = range(7)


class _Fail(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _default_tol(fallback):
    env = os.environ.get(TOL_ENV)
    if env is None:
        return fallback
    try:
        value = float(env)
    except ValueError:
        raise _Fail(EXIT_PARSE, f"{TOL_ENV}={env!r} is not a number") from None
    if not value > 0:
        raise _Fail(EXIT_PARSE, f"{TOL_ENV} must be positive")
    return value


def _tol(args, fallback):
    return args.tol if args.tol is not None else _default_tol(fallback)


def _read(path):
    try:
        return read_matrix(path)
    except MatrixParseError as exc:
        raise _Fail(EXIT_PARSE, f"{path}: {exc}") from None
    except OSError as exc:
        raise _Fail(EXIT_PARSE, f"{path}: {exc.strerror or exc}") from None


def _weights(args, n):
    if not args.weights:
        return None, None
    out = []
    for path in args.weights:
        W = _read(path)
        if W.shape != (n, n):
            raise _Fail(EXIT_PARSE, f"{path}: weight is {W.shape}, expected {(n, n)}")
        try:
            out.append(Weight.from_matrix(W))
        except (NotPositiveDefinite, NotHermitian) as exc:
            raise _Fail(EXIT_WEIGHT, f"{path}: {exc}") from None
    return tuple(out)


def _square(path):
    A = _read(path)
    if A.shape[0] != A.shape[1]:
        raise _Fail(EXIT_PARSE, f"{path}: matrix must be square, got {A.shape}")
    return A


def _save(args, report, M):
    if args.matrix_out:
        write_matrix(args.matrix_out, M)
        report.outputs["matrix_file"] = args.matrix_out


def _pinv_core(args, report, A, E, F, tol):
    try:
        res = weighted_pinv(A, E, F, tol)
    except VerificationFailure as exc:
        report.residuals["penrose"] = list(exc.residuals or ())
        raise _Fail(EXIT_VERIFY, str(exc)) from None
    B = res.B
    if getattr(args, "via", "formula") == "projectors":
        try:
            P, Q = projectors_of(A, E, F, tol)
            B = pinv_from_projectors(A, P, Q)
        except WpinvError as exc:
            raise _Fail(EXIT_VERIFY, str(exc)) from None
    report.outputs["B"] = matrix_to_dict(B)
    n = A.shape[0]
    report.residuals["penrose"] = list(penrose_residuals(A, B, as_weight(E, n), as_weight(F, n)))
    return res, B


def cmd_pinv(args, report):
    A = _square(args.A)
    tol = _tol(args, KERNEL_TOL)
    report.tolerances["cutoff"] = tol
    _, B = _pinv_core(args, report, A, None, None, tol)
    _save(args, report, B)
    return EXIT_OK


def cmd_wpinv(args, report):
    A = _square(args.A)
    E, F = _weights(args, A.shape[0])
    tol = _tol(args, KERNEL_TOL)
    report.tolerances["cutoff"] = tol
    res, B = _pinv_core(args, report, A, E, F, tol)
    report.outputs["P"] = matrix_to_dict(A @ B)
    report.outputs["Q"] = matrix_to_dict(B @ A)
    report.outputs["rank"] = res.rank
    _save(args, report, B)
    if args.check_unique:
        try:
            P, Q = projectors_of(A, E, F, tol)
            S = pinv_from_projectors(A, P, Q)
        except WpinvError as exc:
            raise _Fail(EXIT_VERIFY, str(exc)) from None
        gap = rel(norm2(S - res.B), norm2(res.B))
        report.residuals["cross_path_gap"] = gap
        report.tolerances["cross_path"] = UNIQUE_TOL
        if gap > UNIQUE_TOL:
            report.notes.append(f"formula and projector routes differ by {gap:.2e}")
            return EXIT_CHECK
    return EXIT_OK


def cmd_group(args, report):
    A = _square(args.A)
    tol = _tol(args, KERNEL_TOL)
    report.tolerances["cutoff"] = tol
    try:
        g = group_inverse(A, tol)
    except WpinvError as exc:
        raise _Fail(EXIT_VERIFY, str(exc)) from None
    report.outputs.update(exists=g.exists, rank_A=g.rank_A, rank_A2=g.rank_A2)
    if g.exists:
        report.outputs["sharp"] = matrix_to_dict(g.sharp)
        report.residuals["group"] = list(g.residuals)
        _save(args, report, g.sharp)
    else:
        report.notes.append("rank(A^2) < rank(A): no group inverse")
    return EXIT_OK


def _lambda(text):
    try:
        re_, im = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected re,im") from None
    return complex(re_, im)


def cmd_ep(args, report):
    A = _square(args.A)
    E, F = _weights(args, A.shape[0])
    tol = _tol(args, VERDICT_TOL)
    report.tolerances["verdict"] = tol
    try:
        report.outputs["weighted_ep"] = bool(is_weighted_ep(A, E, F, tol))
        params = ClauseParams(args.k, args.l, args.lam, tol)
        rep = characterization_battery(A, E, F, params, seed=args.seed)
    except PreconditionUnmet as exc:
        report.notes.append(f"battery skipped: {exc}")
        return EXIT_OK
    except VerificationFailure as exc:
        raise _Fail(EXIT_VERIFY, str(exc)) from None
    report.outputs["clauses"] = rep.to_dict()
    report.residuals["worst_true"] = rep.worst_true_residual
    report.residuals["min_false"] = float(rep.min_false_residual)
    if rep.consensus == "mixed":
        report.notes.append("mixed consensus: " + ", ".join(rep.disagreeing))
        return EXIT_MIXED
    return EXIT_OK


def cmd_hermitian(args, report):
    A = _square(args.A)
    tol = _tol(args, VERDICT_TOL)
    report.tolerances["verdict"] = tol
    try:
        rep = is_banach_hermitian(A, args.norm, args.t_max, args.steps, tol)
    except CriterionMismatch as exc:
        raise _Fail(EXIT_MIXED, str(exc)) from None
    report.outputs["hermitian"] = rep.to_dict()
    report.residuals["max_deviation"] = rep.max_deviation
    return EXIT_OK


def cmd_lift_check(args, report):
    A = _square(args.A)
    E, F = _weights(args, A.shape[0])
    tol = _tol(args, VERDICT_TOL)
    report.tolerances["gap"] = tol
    try:
        gap = lift_gap(A, E, F)
    except VerificationFailure as exc:
        raise _Fail(EXIT_VERIFY, str(exc)) from None
    report.residuals["lift_gap"] = gap
    report.outputs["holds"] = gap <= tol
    return EXIT_OK if gap <= tol else EXIT_CHECK


def cmd_block_check(args, report):
    T = _square(args.A)
    n = T.shape[0]
    E, F = _weights(args, n)
    E = np.eye(n) if E is None else E.W
    F = np.eye(n) if F is None else F.W
    tol = _tol(args, VERDICT_TOL)
    report.tolerances.update(gap=tol, sqrt_gap=corpus.SQRT_BLOCK_TOL)
    try:
        models = [BlockModel.from_matrix(M, args.k) for M in (T, E, F)]
        r_inv, r_sqrt = restriction_gaps(*models)
        q_inv, q_sqrt = quotient_gaps(*models)
    except ValueError as exc:
        if isinstance(exc, NotInvariant):
            raise _Fail(EXIT_INVARIANT, str(exc)) from None
        raise _Fail(EXIT_PARSE, str(exc)) from None
    except VerificationFailure as exc:
        raise _Fail(EXIT_VERIFY, str(exc)) from None
    report.residuals.update(
        restriction_gap=r_inv, restriction_sqrt_gap=r_sqrt, quotient_gap=q_inv, quotient_sqrt_gap=q_sqrt
    )
    ok = max(r_inv, q_inv) <= tol and max(r_sqrt, q_sqrt) <= corpus.SQRT_BLOCK_TOL
    report.outputs["holds"] = ok
    return EXIT_OK if ok else EXIT_CHECK


def cmd_corpus(args, report):
    if args.replay:
        results = corpus.replay_manifest(args.replay)
        report.outputs["replay"] = [
            {"index": r.index, "seed": r.seed, "n": r.n, "passed": r.passed, "detail": r.detail}
            for r in results
        ]
        return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK
    if args.mode is None:
        raise _Fail(EXIT_PARSE, "corpus needs --mode or --replay")
    summary = corpus.run_corpus(args.mode, args.n, args.count, args.seed)
    report.outputs["summary"] = summary.to_dict()
    report.residuals["worst"] = summary.worst_residual
    if args.manifest:
        corpus.write_manifest(args.manifest, summary)
        report.outputs["manifest"] = args.manifest
    return EXIT_OK if summary.ok else EXIT_CHECK


def build_parser():
    parser = argparse.ArgumentParser(prog="wpinv", description="Weighted generalized inverses.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--out", help="write the JSON report here as well")

    def matrix_cmd(name, func, weights=False, **kw):
        p = sub.add_parser(name, parents=[common], **kw)
        p.add_argument("A", help="matrix file (.json or .csv)")
        p.add_argument("--matrix-out", help="write the resulting matrix here")
        if weights:
            p.add_argument("--weights", nargs=2, metavar=("E", "F"))
        p.set_defaults(func=func)
        return p

    matrix_cmd("pinv", cmd_pinv, help="Moore-Penrose inverse")
    p = matrix_cmd("wpinv", cmd_wpinv, weights=True, help="weighted Moore-Penrose inverse")
    p.add_argument("--via", choices=("formula", "projectors"), default="formula")
    p.add_argument("--check-unique", action="store_true")
    matrix_cmd("group", cmd_group, help="group inverse")
    p = matrix_cmd("ep", cmd_ep, weights=True, help="weighted-EP clause battery")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--l", type=int, default=2)
    p.add_argument("--lambda", dest="lam", type=_lambda, default=complex(1, 1))
    p.add_argument("--seed", type=int, default=0)
    p = matrix_cmd("hermitian", cmd_hermitian, help="Banach-hermiticity test")
    p.add_argument("--norm", choices=("1", "2", "inf"), default="2")
    p.add_argument("--t-max", type=float, default=DEFAULT_T_MAX)
    p.add_argument("--steps", type=int, default=DEFAULT_STEPS)
    matrix_cmd("lift-check", cmd_lift_check, weights=True, help="left-regular lift identity")
    p = matrix_cmd("block-check", cmd_block_check, weights=True, help="restriction/quotient identities")
    p.add_argument("--k", type=int, required=True, help="size of the leading invariant block")

    p = sub.add_parser("corpus", parents=[common], help="seeded corpus run")
    p.add_argument("--mode", choices=corpus.MODES)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--manifest", help="write failing instances here for replay")
    p.add_argument("--replay", help="re-run the instances listed in a manifest")
    p.set_defaults(func=cmd_corpus)
    return parser


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_PARSE
    report = RunReport(command=["wpinv", *argv])
    files = [getattr(args, "A", None), *(getattr(args, "weights", None) or ())]
    try:
        report.inputs_digest = digest([f for f in files if f])
    except OSError:
        pass
    try:
        code = args.func(args, report)
    except _Fail as exc:
        code = exc.code
        report.notes.append(str(exc))
    except DimensionMismatch as exc:
        code = EXIT_PARSE
        report.notes.append(str(exc))
    report.exit_status = code
    text = report.to_json()
    print(text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
