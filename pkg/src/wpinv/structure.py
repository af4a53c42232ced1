"""Left-regular lift, invariant-subspace restriction and quotient models."""

from dataclasses import dataclass

import numpy as np

from ._validation import check_square, check_tol, rel
from .exceptions import DimensionMismatch, NotInvariant
from .geninv import as_weight, weighted_pinv
from .linalg import DEFAULT_TOL, norm2, principal_sqrt_hpd


@dataclass(frozen=True)
class LiftedOperator:
    """Matrix of ``X -> source @ X`` acting on column-stacked ``vec(X)``."""

    L: np.ndarray
    source: np.ndarray

    def apply(self, X):
        n = self.source.shape[0]
        return (self.L @ X.reshape(-1, order="F")).reshape(n, n, order="F")

    def probe_residual(self):
        """Max deviation of ``L vec(E_ij)`` from ``vec(source E_ij)``."""
        n = self.source.shape[0]
        worst = 0.0
        for j in range(n):
            for i in range(n):
                X = np.zeros((n, n), dtype=np.complex128)
                X[i, j] = 1
                worst = max(worst, float(np.abs(self.apply(X) - self.source @ X).max()))
        return worst


def left_mult_lift(A):
    """``kron(I_n, A)``: n diagonal copies of ``A`` under column stacking."""
    A = check_square(A, "A")
    n = A.shape[0]
    return LiftedOperator(np.kron(np.eye(n), A), A)


def lift_gap(A, E=None, F=None, tol=DEFAULT_TOL):
    """Relative distance between the lifted weighted inverse and the lift of it."""
    A = check_square(A, "A")
    n = A.shape[0]
    E, F = as_weight(E, n), as_weight(F, n)
    B = weighted_pinv(A, E, F, tol).B
    LE = left_mult_lift(E.W).L
    LF = left_mult_lift(F.W).L
    lifted = weighted_pinv(left_mult_lift(A).L, LE, LF, tol).B
    target = left_mult_lift(B).L
    return rel(norm2(lifted - target), norm2(target))


def verify_lift_theorem(A, E=None, F=None, tol=1e-8):
    """The weighted inverse of ``L_A`` (weights ``L_E``, ``L_F``) is ``L`` of ``A^+_{E,F}``."""
    return lift_gap(A, E, F) <= tol


@dataclass(frozen=True)
class BlockModel:
    """Matrix with a leading coordinate block ``span(e_1..e_k)`` marked invariant."""

    T: np.ndarray
    k: int
    invariance_residual: float

    @classmethod
    def from_matrix(cls, T, k):
        T = check_square(T, "T")
        n = T.shape[0]
        if not 1 <= k < n:
            raise ValueError(f"block size k={k} must satisfy 1 <= k < {n}")
        return cls(T, int(k), rel(norm2(T[k:, :k]), norm2(T)))

    @property
    def n(self):
        return self.T.shape[0]

    def is_invariant(self, tol=1e-10):
        return self.invariance_residual <= tol


def restriction_blocks(M, tol=1e-10):
    """``(T11, T22)``: the restriction to the leading block and the quotient block.

    Raises
    ------
    NotInvariant
        If the lower-left block is not negligible.
    """
    if not M.is_invariant(tol):
        raise NotInvariant(
            f"leading block is not invariant (residual {M.invariance_residual:.2e})"
        )
    k = M.k
    return M.T[:k, :k].copy(), M.T[k:, k:].copy()


def _check_models(T, E, F):
    if not (T.k == E.k == F.k and T.n == E.n == F.n):
        raise DimensionMismatch("T, E and F must share the dimension and the block size")


def _block_setup(T, E, F, tol):
    _check_models(T, E, F)
    for name, W in (("E", E), ("F", F)):
        k = W.k
        off = rel(norm2(W.T[:k, k:]) + norm2(W.T[k:, :k]), norm2(W.T))
        if off > tol:
            raise NotInvariant(f"weight {name} does not split along the block")
    restriction_blocks(T, tol)
    B = weighted_pinv(T.T, E.T, F.T).B
    Bm = BlockModel.from_matrix(B, T.k)
    if not Bm.is_invariant(tol):
        raise NotInvariant(
            "the weighted inverse does not leave the leading block invariant "
            f"(residual {Bm.invariance_residual:.2e})"
        )
    return B


def restriction_gaps(T, E, F, tol=1e-10):
    """``(inverse gap, square-root gap)`` for the leading block."""
    B = _block_setup(T, E, F, tol)
    k = T.k
    B11 = weighted_pinv(T.T[:k, :k], E.T[:k, :k], F.T[:k, :k]).B
    inv_gap = rel(norm2(B11 - B[:k, :k]), norm2(B[:k, :k]))
    root = principal_sqrt_hpd(E.T)
    root11 = principal_sqrt_hpd(E.T[:k, :k])
    sqrt_gap = rel(norm2(root11 - root[:k, :k]), norm2(root11))
    return inv_gap, sqrt_gap


def quotient_gaps(T, E, F, tol=1e-10):
    """``(inverse gap, square-root gap)`` for the trailing (quotient) block."""
    B = _block_setup(T, E, F, tol)
    k = T.k
    B22 = weighted_pinv(T.T[k:, k:], E.T[k:, k:], F.T[k:, k:]).B
    inv_gap = rel(norm2(B22 - B[k:, k:]), norm2(B[k:, k:]))
    root = principal_sqrt_hpd(E.T)
    root22 = principal_sqrt_hpd(E.T[k:, k:])
    sqrt_gap = rel(norm2(root22 - root[k:, k:]), norm2(root22))
    return inv_gap, sqrt_gap


def verify_restriction_theorem(T, E, F, tol=1e-8, sqrt_tol=1e-10):
    """Restriction commutes with weighted inversion and with the square root.

    Raises
    ------
    NotInvariant
        When a hypothesis (block invariance of T, of the weights or of the
        weighted inverse) fails; this is not a failure of the identity.
    """
    check_tol(tol)
    inv_gap, sqrt_gap = restriction_gaps(T, E, F)
    return inv_gap <= tol and sqrt_gap <= sqrt_tol


def verify_quotient_theorem(T, E, F, tol=1e-8, sqrt_tol=1e-10):
    """Quotient counterpart of :func:`verify_restriction_theorem`."""
    check_tol(tol)
    inv_gap, sqrt_gap = quotient_gaps(T, E, F)
    return inv_gap <= tol and sqrt_gap <= sqrt_tol

