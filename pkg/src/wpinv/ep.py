"""Weighted-EP decision and the equivalence-theorem clause battery.

A matrix ``A`` is weighted EP for weights ``E``, ``F`` when its weighted
Moore-Penrose inverse commutes with it. Three theorems list conditions
equivalent to this (for ``A`` with a group inverse). The battery evaluates
each listed condition numerically; because they are all equivalent, a
correct implementation on a well-conditioned instance must report every
clause true or every clause false. A mixed outcome is an alarm.

Clause ids are prefixed by the theorem they come from:

``split``  the idempotent-projector characterization and its lift
``op``     the sixteen-clause operator theorem
``pow``    the nineteen-clause theorem with powers ``k``, ``l`` and ``lambda``
``alg``    the thirty-eight-clause algebra theorem

Many algebra clauses coincide with operator clauses in the matrix algebra;
those rows reuse the shared evaluation and name it in ``same_as``.
"""

from dataclasses import dataclass, field

import numpy as np

from ._validation import check_tol, rel
from .exceptions import Defective, PreconditionUnmet, WitnessFailure
from .geninv import _prepare, group_inverse, weighted_pinv
from .linalg import DEFAULT_TOL, EXP_EIG_COND_LIMIT, norm2, rank
from .structure import left_mult_lift
from .testkit import complex_gaussian, make_rng

DEFAULT_EP_TOL = 1e-8


@dataclass(frozen=True)
class ClauseParams:
    k: int = 2
    l: int = 2
    lam: complex = 1 + 1j
    tol: float = DEFAULT_EP_TOL

    def __post_init__(self):
        if int(self.k) < 1 or int(self.l) < 1:
            raise ValueError("k and l must be positive integers")
        if self.lam == 0:
            raise ValueError("lambda must be nonzero")
        check_tol(self.tol)


@dataclass(frozen=True)
class Clause:
    clause_id: str
    holds: bool
    residual: float
    note: str = ""
    same_as: str = ""

    def to_dict(self):
        d = {"clause_id": self.clause_id, "holds": self.holds, "residual": self.residual}
        if self.note:
            d["note"] = self.note
        if self.same_as:
            d["same_as"] = self.same_as
        return d


@dataclass(frozen=True)
class ClauseReport:
    clauses: tuple
    consensus: str
    ep_verdict: bool
    disagreeing: tuple = field(default=())
    params: ClauseParams = field(default_factory=ClauseParams)

    def __getitem__(self, clause_id):
        for c in self.clauses:
            if c.clause_id == clause_id:
                return c
        raise KeyError(clause_id)

    @property
    def worst_true_residual(self):
        """Largest residual among the clauses that hold (0 if none do)."""
        return max((c.residual for c in self.clauses if c.holds), default=0.0)

    @property
    def min_false_residual(self):
        """Smallest residual among the clauses that fail (inf if none do)."""
        return min((c.residual for c in self.clauses if not c.holds), default=np.inf)

    def to_dict(self):
        return {
            "consensus": self.consensus,
            "ep_verdict": self.ep_verdict,
            "disagreeing": list(self.disagreeing),
            "params": {
                "k": self.params.k,
                "l": self.params.l,
                "lambda": [self.params.lam.real, self.params.lam.imag],
                "tol": self.params.tol,
            },
            "clauses": [c.to_dict() for c in self.clauses],
        }


def _mpow(X, k):
    return np.linalg.matrix_power(X, k)


def _equal(*mats):
    """Largest distance of any side from the first, relative to the largest side."""
    ref = mats[0]
    err = max(norm2(M - ref) for M in mats[1:])
    return rel(err, max(norm2(M) for M in mats))


def _incl_gap(X, Y, tol):
    """0 if range(X) lies in range(Y); otherwise the excess singular value."""
    nx, ny = norm2(X), norm2(Y)
    if nx == 0:
        return 0.0
    if ny == 0:
        return 1.0
    Yn = Y / ny
    r = rank(Yn, tol)
    s = np.linalg.svd(np.hstack([Yn, X / nx]), compute_uv=False)
    return float(s[r] / s[0]) if s.size > r else 0.0


def _range_incl(X, Y, tol):
    return _incl_gap(X, Y, tol)


def _null_incl(X, Y, tol):
    """Gap for null(X) inside null(Y)."""
    return _incl_gap(Y.conj().T, X.conj().T, tol)


def _commute_residual(X, Y):
    return rel(norm2(X @ Y - Y @ X), norm2(X) * norm2(Y))


def is_weighted_ep(A, E=None, F=None, tol=DEFAULT_EP_TOL):
    """``A`` commutes with its weighted Moore-Penrose inverse."""
    A, E, F = _prepare(A, E, F)
    B = weighted_pinv(A, E, F).B
    return _commute_residual(A, B) <= tol


def _ep_residual(X, E, F):
    return _commute_residual(X, weighted_pinv(X, E, F).B)


def _polynomial_residual(A, B, breakdown=1e-10):
    """Distance from ``B`` to the algebra of polynomials in ``A``.

    Builds an orthonormal (Frobenius) basis of span{I, A, ..., A^{n-1}} by
    Arnoldi in matrix space and returns the relative norm of the part of
    ``B`` outside it.
    """
    n = A.shape[0]
    nB = np.linalg.norm(B)
    if nB == 0:
        return 0.0
    scale = norm2(A) or 1.0
    basis = []
    X = np.eye(n, dtype=np.complex128)
    for _ in range(n):
        before = np.linalg.norm(X)
        for _ in range(2):
            for Q in basis:
                X = X - np.vdot(Q, X) * Q
        after = np.linalg.norm(X)
        if after <= breakdown * before:
            break
        X = X / after
        basis.append(X)
        X = A @ X / scale
    R = B.copy()
    for _ in range(2):
        for Q in basis:
            R = R - np.vdot(Q, R) * Q
    return float(np.linalg.norm(R) / nB)


def _commutant_probes(A, n_probes, seed):
    """Matrices that commute with ``A``: A itself, polynomials, eigenbasis probes."""
    n = A.shape[0]
    rng = make_rng(seed, 7, n)
    probes = [A]
    scale = norm2(A) or 1.0
    As = A / scale
    for _ in range(n_probes):
        coeffs = complex_gaussian(rng, n)
        P = np.zeros_like(A)
        for c in coeffs[::-1]:
            P = P @ As + c * np.eye(n)
        probes.append(P)
    lam, V = np.linalg.eig(A)
    if np.linalg.cond(V) < EXP_EIG_COND_LIMIT:
        Vinv = np.linalg.inv(V)
        for _ in range(n_probes):
            b = (V * complex_gaussian(rng, n)) @ Vinv
            if _commute_residual(A, b) <= 1e-11:
                probes.append(b)
    return probes


def _commutant_residual(A, B, n_probes, seed):
    return max(_commute_residual(B, b) for b in _commutant_probes(A, n_probes, seed))


def commutant_probe(A, E=None, F=None, n_probes=4, seed=0, tol=DEFAULT_EP_TOL):
    """Check that every probe commuting with ``A`` also commutes with ``A^+_{E,F}``.

    One-sided: ``False`` refutes weighted EP; ``True`` only supports it.
    """
    A, E, F = _prepare(A, E, F)
    B = weighted_pinv(A, E, F).B
    return _commutant_residual(A, B, n_probes, seed) <= tol


def invertible_factor_witness(A, E=None, F=None, tol=DEFAULT_EP_TOL):
    """Invertible ``U = A^2 + I - BA`` and ``V = A^2 + I - AB`` with ``A = BU = VB``.

    Also checks ``A = UB = BV`` and the explicit inverse
    ``U^{-1} = B^2 + I - BA``.

    Raises
    ------
    WitnessFailure
        If a factor is singular or an identity fails, which refutes weighted EP.
    """
    A, E, F = _prepare(A, E, F)
    n = A.shape[0]
    I = np.eye(n)
    B = weighted_pinv(A, E, F).B
    U = A @ A + I - B @ A
    V = A @ A + I - A @ B
    nB, nU, nV = norm2(B), norm2(U), norm2(V)
    residuals = {
        "A=BU": rel(norm2(A - B @ U), nB * nU),
        "A=UB": rel(norm2(A - U @ B), nB * nU),
        "A=VB": rel(norm2(A - V @ B), nB * nV),
        "A=BV": rel(norm2(A - B @ V), nB * nV),
        "U^-1": rel(norm2(U @ (B @ B + I - B @ A) - I), nU * (norm2(B @ B + I - B @ A))),
    }
    bad = {key: r for key, r in residuals.items() if r > tol}
    for name, M in (("U", U), ("V", V)):
        if np.linalg.cond(M) * tol > 1:
            bad[f"{name} singular"] = float(np.linalg.cond(M))
    if bad:
        raise WitnessFailure(
            "invertible factor witness failed: "
            + ", ".join(f"{k} {v:.2e}" for k, v in bad.items())
        )
    return U, V


def _interpolation_nodes(lam, scale, cluster_tol):
    nodes = [0.0 + 0.0j]
    for z in sorted(lam, key=abs):
        if abs(z) <= cluster_tol * scale:
            continue
        if all(abs(z - w) > cluster_tol * scale for w in nodes):
            nodes.append(complex(z))
    return np.array(nodes)


def spectral_pinv_witness(A, E=None, F=None, tol=1e-7, cluster_tol=1e-8):
    """Polynomial ``p`` with ``p(A) = A^+_{E,F}`` for a diagonalizable weighted-EP ``A``.

    ``p`` interpolates ``1/z`` on the nonzero eigenvalues and vanishes at 0.
    Coefficients are returned lowest degree first.

    Raises
    ------
    Defective
        If ``A`` is not numerically diagonalizable (no witness, not a refutation).
    WitnessFailure
        If ``p(A)`` misses the weighted inverse by more than ``tol``.
    """
    A, E, F = _prepare(A, E, F)
    n = A.shape[0]
    lam, V = np.linalg.eig(A)
    if not np.linalg.cond(V) < EXP_EIG_COND_LIMIT:
        raise Defective("eigenvector matrix is numerically singular")
    B = weighted_pinv(A, E, F).B
    scale = float(np.abs(lam).max()) if lam.size else 0.0
    if scale == 0:
        coeffs = np.zeros(1, dtype=np.complex128)
        pA = np.zeros_like(A)
    else:
        nodes = _interpolation_nodes(lam, scale, cluster_tol)
        values = np.array([0.0] + [1 / z for z in nodes[1:]])
        z = nodes / scale
        cz = np.linalg.solve(np.vander(z, increasing=True), values)
        coeffs = cz / scale ** np.arange(cz.size)
        As = A / scale
        pA = np.zeros_like(A)
        for c in cz[::-1]:
            pA = pA @ As + c * np.eye(n)
    res = rel(norm2(pA - B), norm2(B))
    if res > tol:
        raise WitnessFailure(f"p(A) misses the weighted inverse by {res:.2e}")
    return coeffs


class _Battery:
    def __init__(self, A, E, F, params, sharp, n_probes, seed):
        self.params = params
        self.tol = params.tol
        self.E, self.F = E, F
        self.n_probes, self.seed = n_probes, seed
        n = A.shape[0]
        self.n = n
        B = weighted_pinv(A, E, F).B
        self.A, self.B, self.S = A, B, sharp
        self.I = np.eye(n, dtype=np.complex128)
        self.B_FE = weighted_pinv(A, F, E).B
        self.B_EE = weighted_pinv(A, E, E).B
        self.B_FF = weighted_pinv(A, F, F).B
        self.rows = []
        self.cache = {}

    def add(self, cid, residual, note="", same_as=""):
        row = Clause(cid, bool(residual <= self.tol), float(residual), note, same_as)
        self.rows.append(row)
        self.cache[cid] = row
        return row

    def alias(self, cid, target):
        src = self.cache[target]
        row = Clause(cid, src.holds, src.residual, src.note, target)
        self.rows.append(row)

    # subspace helpers on raw matrices
    def rng_incl(self, X, Y):
        return _range_incl(X, Y, self.tol)

    def null_incl(self, X, Y):
        return _null_incl(X, Y, self.tol)

    def splitting(self):
        A, S, E, F = self.A, self.S, self.E, self.F
        P = A @ S

        def herm(W):
            WP = W.W @ P
            return rel(norm2(WP.conj().T - WP), norm2(WP))

        self.add("split.ii", max(herm(E), herm(F)))
        LA = left_mult_lift(A).L
        LE = left_mult_lift(E.W).L
        LF = left_mult_lift(F.W).L
        LB = weighted_pinv(LA, LE, LF).B
        self.add("split.v", _commute_residual(LA, LB))

    def operator_theorem(self):
        A, B, S = self.A, self.B, self.S
        T, D, G = A, B, S
        E, F = self.E, self.F
        self.add("op.i", _commute_residual(A, B))
        rBT, rTB = self.rng_incl(B, A), self.rng_incl(A, B)
        nTB, nBT = self.null_incl(A, B), self.null_incl(B, A)
        self.add("op.ii", max(rBT, rTB, nTB, nBT))
        self.add("op.iii", max(rBT, nTB))
        self.add("op.iv", max(rTB, nTB))
        self.add("op.v", max(rBT, nBT))
        self.add("op.vi", max(rTB, nBT))
        self.add("op.vii", _equal(D, G))
        self.add("op.viii", _equal(D, T @ D @ D, D @ D @ T))
        self.add("op.ix", _equal(T, D @ T @ T, T @ T @ D))
        back = weighted_pinv(B, F, E).B
        self.add("op.x", max(_commute_residual(B, back), rel(norm2(back - A), norm2(A))))
        self.add("op.xi", _commute_residual(A, self.B_FE))
        self.add(
            "op.xii", max(_commute_residual(A, self.B_EE), _commute_residual(A, self.B_FF))
        )
        for k in self._ks():
            Ak = np.linalg.matrix_power(A, k)
            self.add(f"op.xiii{self._ksuffix(k)}", _ep_residual(Ak, E, F))
        self.add("op.xiv", _ep_residual(S, E, F))
        TG = T @ G
        BEE, BFF, BFE = self.B_EE, self.B_FF, self.B_FE
        self.add("op.xv.a", _equal(TG, T @ BEE, T @ BFF))
        self.add("op.xv.b", _equal(TG, BEE @ T, BFF @ T))
        self.add("op.xvi.a", _equal(TG, T @ D, T @ BFE))
        self.add("op.xvi.b", _equal(TG, BFE @ T, D @ T))

    def _ks(self):
        k = int(self.params.k)
        return [k] if k == 1 else [k, 1]

    def _ksuffix(self, k):
        return "" if k == self.params.k else f"@k={k}"

    def power_theorem(self):
        T, D, G, I = self.A, self.B, self.S, self.I
        l, lam = int(self.params.l), self.params.lam
        self.add("pow.i", _equal(T @ G @ D, D @ G @ T))
        self.add("pow.ii", _equal(T @ D @ D @ T, D @ T @ T @ D))
        self.add("pow.iii", _equal(D @ G @ T + T @ G @ D, 2 * D))
        self.add("pow.iv", _equal(D @ D @ G, D @ G @ D, G @ D @ D))
        self.add("pow.v", _equal(T @ D @ D, G, D @ D @ T))
        for k in self._ks():
            sx = self._ksuffix(k)
            Tk, Dk, Gk = _mpow(T, k), _mpow(D, k), _mpow(G, k)
            Gk1 = _mpow(G, k - 1) if k > 1 else I
            self.add(f"pow.vi{sx}", _equal(Tk, D @ T @ Tk, Tk @ T @ D))
            self.add(f"pow.vii{sx}", _equal(Dk, Gk))
            self.add(f"pow.viii{sx}", _equal(Gk @ D, D @ Gk))
            self.add(f"pow.ix{sx}", _equal(Tk @ D, D @ Tk))
            self.add(f"pow.x{sx}", _equal(_mpow(T, 2 * k - 1), D @ _mpow(T, 2 * k + 1) @ D))
            self.add(f"pow.xi{sx}", _equal(Gk @ D @ T, Dk))
            self.add(f"pow.xii{sx}", _equal(T @ _mpow(D, k + 1), Gk, _mpow(D, k + 1) @ T))
            self.add(f"pow.xiii{sx}", _equal(Tk @ T @ D + D @ T @ Tk, 2 * Tk))
            Dl, Gl = _mpow(D, l), _mpow(G, l)
            self.add(
                f"pow.xiv{sx}", _equal(_mpow(G, k + l - 1), Dl @ Gk1, Gk1 @ Dl)
            )
            self.add(
                f"pow.xv{sx}",
                _equal(T @ D @ _mpow(G, k + l - 1), Dk @ Gl @ T, Gl @ T @ Dk),
            )
            TD, DT = T @ D, D @ T
            X = Tk + lam * D
            self.add(f"pow.xvi{sx}", _equal(TD @ X, X @ TD))
            self.add(f"pow.xvii{sx}", _equal(DT @ X, X @ DT))
        A = self.A
        cubic = lam * A + A @ A @ A
        XE = A + lam * self.B_EE
        XF = A + lam * self.B_FF
        XEF = A + lam * self.B
        self.add("pow.xviii", self._same_subspaces(XE, XF, cubic))
        self.add("pow.xix", self._same_subspaces(XEF, cubic))

    def _same_subspaces(self, *mats):
        gaps = []
        ref = mats[0]
        for M in mats[1:]:
            gaps += [
                self.rng_incl(ref, M),
                self.rng_incl(M, ref),
                self.null_incl(ref, M),
                self.null_incl(M, ref),
            ]
        return max(gaps)

    def algebra_theorem(self):
        al = self.alias
        al("alg.i", "op.i")
        for roman in ("ii", "iii", "iv", "v", "vi"):
            al(f"alg.{roman}", f"op.{roman}")
        al("alg.vii", "op.viii")
        A, B = self.A, self.B
        E, F = self.E, self.F
        back = weighted_pinv(B, F, E).B
        self.add("alg.viii", _commute_residual(B, back))
        al("alg.ix", "pow.iii")
        al("alg.x", "pow.iv")
        al("alg.xi", "pow.v")
        al("alg.xii", "pow.ii")
        al("alg.xiii", "pow.i")
        # in M_n, A = B u with u invertible iff range(A) = range(B); same for rows
        self.add(
            "alg.xiv",
            max(
                self.rng_incl(A, B),
                self.rng_incl(B, A),
                self.null_incl(A, B),
                self.null_incl(B, A),
            ),
        )
        self.add("alg.xv", self._witness_residual(), note="witness-based")
        self.add("alg.xvi", max(self.rng_incl(A, B), self.null_incl(B, A)))
        self.add(
            "alg.xvii",
            _commutant_residual(A, B, self.n_probes, self.seed),
            note="probe-supported",
        )
        self.add("alg.xviii", _polynomial_residual(A, B), note="polynomial-algebra test")
        for k in self._ks():
            sx = self._ksuffix(k)
            al(f"alg.xix{sx}", f"pow.xi{sx}")
            al(f"alg.xx{sx}", f"pow.vi{sx}")
            al(f"alg.xxi{sx}", f"pow.vii{sx}")
            al(f"alg.xxii{sx}", f"pow.viii{sx}")
            al(f"alg.xxiii{sx}", f"pow.ix{sx}")
            al(f"alg.xxiv{sx}", f"pow.x{sx}")
            al(f"alg.xxv{sx}", f"pow.xii{sx}")
            al(f"alg.xxvi{sx}", f"pow.xiii{sx}")
            al(f"alg.xxvii{sx}", f"pow.xiv{sx}")
            al(f"alg.xxviii{sx}", f"pow.xv{sx}")
        al("alg.xxix", "op.xi")
        al("alg.xxx", "op.xii")
        for k in self._ks():
            al(f"alg.xxxi{self._ksuffix(k)}", f"op.xiii{self._ksuffix(k)}")
        al("alg.xxxii", "op.xiv")
        al("alg.xxxiii.a", "op.xv.a")
        al("alg.xxxiii.b", "op.xv.b")
        al("alg.xxxiv.a", "op.xvi.a")
        al("alg.xxxiv.b", "op.xvi.b")
        for k in self._ks():
            sx = self._ksuffix(k)
            al(f"alg.xxxv{sx}", f"pow.xvi{sx}")
            al(f"alg.xxxvi{sx}", f"pow.xvii{sx}")
        al("alg.xxxvii", "pow.xviii")
        al("alg.xxxviii", "pow.xix")

    def _witness_residual(self):
        A, B = self.A, self.B
        I = np.eye(self.n)
        U = A @ A + I - B @ A
        V = A @ A + I - A @ B
        nB = norm2(B)
        res = max(
            rel(norm2(A - U @ B), nB * norm2(U)),
            rel(norm2(A - B @ V), nB * norm2(V)),
        )
        # singular factors cannot witness the clause
        if max(np.linalg.cond(U), np.linalg.cond(V)) * self.tol > 1:
            return max(res, 1.0)
        return res


def characterization_battery(A, E=None, F=None, params=None, n_probes=4, seed=0):
    """Evaluate every implementable clause of the weighted-EP theorems.

    Raises
    ------
    PreconditionUnmet
        If ``A`` has no group inverse (index > 1).
    """
    params = ClauseParams() if params is None else params
    A, E, F = _prepare(A, E, F)
    g = group_inverse(A, DEFAULT_TOL)
    if not g.exists:
        raise PreconditionUnmet(
            f"group inverse does not exist (rank A = {g.rank_A}, rank A^2 = {g.rank_A2})"
        )
    bat = _Battery(A, E, F, params, g.sharp, n_probes, seed)
    bat.splitting()
    bat.operator_theorem()
    bat.power_theorem()
    bat.algebra_theorem()
    rows = tuple(bat.rows)
    ep = bat.cache["op.i"].holds
    truths = {c.holds for c in rows}
    if truths == {True}:
        consensus = "all-true"
    elif truths == {False}:
        consensus = "all-false"
    else:
        consensus = "mixed"
    disagreeing = tuple(c.clause_id for c in rows if c.holds != ep) if consensus == "mixed" else ()
    return ClauseReport(rows, consensus, ep, disagreeing, params)
