"""Weighted Moore-Penrose inverse (two independent routes) and group inverse."""

from dataclasses import dataclass, field

import numpy as np

from ._validation import as_cmatrix, check_same_shape, check_square, check_tol, rel
from .exceptions import (
    DimensionMismatch,
    InconsistentProjectors,
    SingularCore,
    VerificationFailure,
)
from .linalg import (
    DEFAULT_TOL,
    hpd_sqrt_pair,
    norm2,
    range_basis,
    rank,
    same_null,
    same_range,
    svd_pinv,
)

# residual tolerance used when the caller does not supply one
VERIFY_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Weight:
    """A hermitian positive definite weight with its square roots cached.

    Build with :meth:`from_matrix`; the constructor does not validate.
    """

    W: np.ndarray
    sqrt: np.ndarray
    inv_sqrt: np.ndarray

    @classmethod
    def from_matrix(cls, W, tol=1e-12):
        W = check_square(W, "W").copy()
        sqrt, inv_sqrt = hpd_sqrt_pair(W, tol)
        for arr in (W, sqrt, inv_sqrt):
            arr.flags.writeable = False
        return cls(W, sqrt, inv_sqrt)

    @classmethod
    def identity(cls, n):
        return cls.from_matrix(np.eye(n))

    @property
    def n(self):
        return self.W.shape[0]

    @property
    def inv(self):
        return self.inv_sqrt @ self.inv_sqrt


def as_weight(W, n=None):
    """Coerce ``None`` (unit weight), an array or a :class:`Weight`."""
    if W is None:
        if n is None:
            raise ValueError("dimension required for a unit weight")
        return Weight.identity(n)
    if not isinstance(W, Weight):
        W = Weight.from_matrix(W)
    if n is not None and W.n != n:
        raise DimensionMismatch(f"weight is {W.n}x{W.n}, expected {n}x{n}")
    return W


def _hermitian_defect(M):
    return rel(norm2(M.conj().T - M), norm2(M))


@dataclass(frozen=True)
class WeightedPinvResult:
    B: np.ndarray
    P: np.ndarray
    Q: np.ndarray
    residuals: tuple
    tol: float
    rank: int = field(default=0)

    @property
    def success(self):
        return max(self.residuals) <= self.tol


def penrose_residuals(A, B, E, F):
    """Relative residuals of the four weighted Penrose conditions.

    Returns ``(|ABA-A|/|A|, |BAB-B|/|B|, defect(E AB), defect(F BA))`` where
    ``defect(M) = |M* - M| / |M|``; a zero reference counts as exact.
    """
    AB, BA = A @ B, B @ A
    return (
        rel(norm2(AB @ A - A), norm2(A)),
        rel(norm2(BA @ B - B), norm2(B)),
        _hermitian_defect(E.W @ AB),
        _hermitian_defect(F.W @ BA),
    )


def _prepare(A, E, F):
    A = check_square(A, "A")
    n = A.shape[0]
    return A, as_weight(E, n), as_weight(F, n)


def weighted_pinv(A, E=None, F=None, tol=DEFAULT_TOL, verify_tol=VERIFY_TOL):
    """Weighted Moore-Penrose inverse of a square matrix.

    Computed as ``F^{-1/2} (E^{1/2} A F^{-1/2})^+ E^{1/2}``. ``tol`` is the
    relative singular-value cutoff of the inner pseudoinverse and
    ``verify_tol`` bounds the four reported residuals.

    Raises
    ------
    VerificationFailure
        If any residual exceeds ``verify_tol``.
    """
    A, E, F = _prepare(A, E, F)
    tol = check_tol(tol)
    M = E.sqrt @ A @ F.inv_sqrt
    B = F.inv_sqrt @ svd_pinv(M, tol) @ E.sqrt
    res = penrose_residuals(A, B, E, F)
    result = WeightedPinvResult(B, A @ B, B @ A, res, float(verify_tol), rank(M, tol))
    if not result.success:
        raise VerificationFailure(
            "weighted pseudoinverse failed its defining conditions: "
            + ", ".join(f"{r:.2e}" for r in res),
            residuals=res,
        )
    return result


def _idempotent_defect(P):
    return rel(norm2(P @ P - P), max(norm2(P), 1.0))


def projectors_of(A, E=None, F=None, tol=DEFAULT_TOL, verify_tol=VERIFY_TOL):
    """The projector pair ``P = AB`` (E-hermitian) and ``Q = BA`` (F-hermitian).

    Also checks ``range(P) = range(A)`` and ``null(Q) = null(A)`` by rank.
    """
    A, E, F = _prepare(A, E, F)
    res = weighted_pinv(A, E, F, tol, verify_tol)
    P, Q = res.P, res.Q
    defects = (
        _idempotent_defect(P),
        _idempotent_defect(Q),
        _hermitian_defect(E.W @ P),
        _hermitian_defect(F.W @ Q),
    )
    if max(defects) > verify_tol:
        raise VerificationFailure("projector pair is not idempotent/hermitian", defects)
    rtol = max(verify_tol, tol)
    if not (same_range(P, A, rtol) and same_null(Q, A, rtol)):
        raise VerificationFailure("projector ranges do not match A")
    return P, Q


def pinv_from_projectors(A, P, Q, tol=VERIFY_TOL):
    """Rebuild the generalized inverse fixed by an idempotent pair.

    The result vanishes on null(P) and inverts ``A`` restricted to
    range(Q), landing back in range(Q). No pseudoinverse is involved: a
    basis ``Y`` of range(Q) comes from pivoted QR and ``AY = QR`` is solved
    by back-substitution.

    Raises
    ------
    InconsistentProjectors
        If P or Q is not idempotent, ``range(P) != range(A)`` or
        ``null(Q) != null(A)``.
    """
    A = check_square(A, "A")
    P = as_cmatrix(P, "P")
    Q = as_cmatrix(Q, "Q")
    check_same_shape(A, P, ("A", "P"))
    check_same_shape(A, Q, ("A", "Q"))
    tol = check_tol(tol)
    if max(_idempotent_defect(P), _idempotent_defect(Q)) > tol:
        raise InconsistentProjectors("P and Q must be idempotent")
    if not same_range(P, A, tol):
        raise InconsistentProjectors("range(P) differs from range(A)")
    if not same_null(Q, A, tol):
        raise InconsistentProjectors("null(Q) differs from null(A)")
    n = A.shape[0]
    Y = range_basis(Q, tol)
    if Y.shape[1] == 0:
        return np.zeros((n, n), dtype=np.complex128)
    Qa, Ra = np.linalg.qr(A @ Y)
    coeffs = np.linalg.solve(Ra, Qa.conj().T @ P)
    return Y @ coeffs


def reverse_weights_identity_check(A, E=None, F=None, tol=1e-9, cutoff=DEFAULT_TOL):
    """Check that inverting ``A^+_{E,F}`` with weights (F, E) returns ``A``."""
    A, E, F = _prepare(A, E, F)
    B = weighted_pinv(A, E, F, cutoff).B
    back = weighted_pinv(B, F, E, cutoff).B
    return rel(norm2(back - A), norm2(A)) <= tol


@dataclass(frozen=True)
class GroupInvResult:
    exists: bool
    sharp: np.ndarray | None
    rank_A: int
    rank_A2: int
    residuals: tuple = ()


def full_rank_factorization(A, tol=DEFAULT_TOL):
    """``A = C @ R`` with ``C`` n x r and ``R`` r x n, from the SVD."""
    A = as_cmatrix(A)
    r = rank(A, tol)
    U, s, Vh = np.linalg.svd(A, full_matrices=False)
    return U[:, :r] * s[:r], Vh[:r]


def group_inverse(A, tol=DEFAULT_TOL, verify_tol=VERIFY_TOL):
    """Group inverse via a full-rank factorization, when the index is <= 1.

    Existence is decided by ``rank(A) == rank(A^2)`` at cutoff ``tol``;
    ``A# = C (RC)^{-2} R`` for ``A = CR``.
    """
    A = check_square(A, "A")
    tol = check_tol(tol)
    rA, rA2 = rank(A, tol), rank(A @ A, tol)
    if rA != rA2:
        return GroupInvResult(False, None, rA, rA2)
    n = A.shape[0]
    if rA == 0:
        return GroupInvResult(True, np.zeros((n, n), dtype=np.complex128), 0, 0, (0.0,) * 3)
    C, R = full_rank_factorization(A, tol)
    core = R @ C
    if np.linalg.cond(core) * tol > 1:
        raise SingularCore(
            f"RC is numerically singular (cond {np.linalg.cond(core):.2e}) "
            "although rank(A) == rank(A^2)"
        )
    inv_core = np.linalg.inv(core)
    S = C @ inv_core @ inv_core @ R
    nA, nS = norm2(A), norm2(S)
    res = (
        rel(norm2(A @ S @ A - A), nA * nA * nS),
        rel(norm2(S @ A @ S - S), nS * nS * nA),
        rel(norm2(A @ S - S @ A), nA * nS),
    )
    if max(res) > verify_tol:
        raise SingularCore(
            "group inverse identities fail: " + ", ".join(f"{r:.2e}" for r in res)
        )
    return GroupInvResult(True, S, rA, rA2, res)
