"""Dense complex matrix kernel.

Norms, the SVD pseudoinverse, the principal square root of a hermitian
positive definite matrix, the matrix exponential, eigendecomposition and
numerical rank. Matrices are plain ``complex128`` numpy arrays; every
function returns new arrays and never mutates its inputs.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.linalg

from ._validation import as_cmatrix, check_square, check_tol
from .exceptions import ConvergenceFailure, NotHermitian, NotPositiveDefinite

DEFAULT_TOL = 1e-10

# eigenvector condition number above which exp() leaves the eigenbasis path
EXP_EIG_COND_LIMIT = 1e6


class NormKind(Enum):
    INDUCED_1 = "1"
    INDUCED_2 = "2"
    INDUCED_INF = "inf"
    FROBENIUS = "fro"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {
            "1": cls.INDUCED_1,
            "induced-1": cls.INDUCED_1,
            "2": cls.INDUCED_2,
            "induced-2": cls.INDUCED_2,
            "spectral": cls.INDUCED_2,
            "inf": cls.INDUCED_INF,
            "induced-inf": cls.INDUCED_INF,
            "fro": cls.FROBENIUS,
            "frobenius": cls.FROBENIUS,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown norm kind {value!r}") from None


@dataclass(frozen=True)
class SpectralData:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    condition: float
    residual: float

    @property
    def defective(self):
        """True when the eigenvector basis is numerically singular."""
        return not self.condition < EXP_EIG_COND_LIMIT


def induced_norm(M, kind=NormKind.INDUCED_2):
    """Operator norm of ``M`` induced by the vector 1-, 2- or inf-norm.

    ``kind=NormKind.FROBENIUS`` returns the Frobenius norm, which is not an
    operator norm and is only offered as an auxiliary measurement.
    """
    M = as_cmatrix(M)
    kind = NormKind.parse(kind)
    if M.size == 0:
        return 0.0
    if kind is NormKind.INDUCED_1:
        return float(np.abs(M).sum(axis=0).max())
    if kind is NormKind.INDUCED_INF:
        return float(np.abs(M).sum(axis=1).max())
    if kind is NormKind.FROBENIUS:
        return float(np.linalg.norm(M, "fro"))
    return float(np.linalg.svd(M, compute_uv=False)[0])


def norm2(M):
    """Spectral norm without re-validating the input (internal hot path)."""
    if M.size == 0:
        return 0.0
    return float(np.linalg.svd(M, compute_uv=False)[0])


def svd_pinv(M, tol=DEFAULT_TOL):
    """Moore-Penrose inverse via the SVD with a relative rank cutoff.

    Singular values at or below ``tol * sigma_max`` are treated as zero.
    The zero matrix maps to the (transposed-shape) zero matrix.
    """
    M = as_cmatrix(M)
    tol = check_tol(tol)
    m, n = M.shape
    if M.size == 0 or not M.any():
        return np.zeros((n, m), dtype=np.complex128)
    U, s, Vh = np.linalg.svd(M, full_matrices=False)
    keep = s > tol * s[0]
    return (Vh[keep].conj().T / s[keep]) @ U[:, keep].conj().T


def _hpd_eigh(P, tol):
    P = check_square(P, "P")
    tol = check_tol(tol)
    scale = norm2(P)
    if norm2(P - P.conj().T) > tol * scale:
        raise NotHermitian("matrix is not hermitian within tolerance")
    w, V = np.linalg.eigh((P + P.conj().T) / 2)
    if w.size and not w[0] > tol * w[-1]:
        raise NotPositiveDefinite(
            f"min eigenvalue {w[0]:.3e} <= {tol:.1e} * max eigenvalue {w[-1]:.3e}"
        )
    return w, V


def principal_sqrt_hpd(P, tol=1e-12):
    """The unique hermitian positive definite square root of ``P``."""
    w, V = _hpd_eigh(P, tol)
    return (V * np.sqrt(w)) @ V.conj().T


def hpd_sqrt_pair(P, tol=1e-12):
    """``(P^{1/2}, P^{-1/2})`` from a single eigendecomposition."""
    w, V = _hpd_eigh(P, tol)
    r = np.sqrt(w)
    return (V * r) @ V.conj().T, (V / r) @ V.conj().T


def _is_hermitian(M, rtol=1e-14):
    return np.abs(M - M.conj().T).max() <= rtol * np.abs(M).max()


def matrix_exp(M):
    """Matrix exponential.

    Hermitian and skew-hermitian inputs go through ``eigh``; other inputs
    use the eigenbasis when its condition number is below
    ``EXP_EIG_COND_LIMIT`` and fall back to scaling-and-squaring otherwise.
    """
    M = check_square(M)
    n = M.shape[0]
    if not M.any():
        return np.eye(n, dtype=np.complex128)
    if _is_hermitian(M):
        w, V = np.linalg.eigh(M)
        return (V * np.exp(w)) @ V.conj().T
    if _is_hermitian(1j * M):
        w, V = np.linalg.eigh(1j * M)
        return (V * np.exp(-1j * w)) @ V.conj().T
    try:
        lam, V = np.linalg.eig(M)
    except np.linalg.LinAlgError:
        return scipy.linalg.expm(M)
    if np.linalg.cond(V) < EXP_EIG_COND_LIMIT:
        return np.linalg.solve(V.T, (V * np.exp(lam)).T).T
    return scipy.linalg.expm(M)


def exp_it_family(A):
    """Return ``t -> exp(i t A)`` sharing one decomposition across all t."""
    A = check_square(A)
    n = A.shape[0]
    if not A.any():
        eye = np.eye(n, dtype=np.complex128)
        return lambda t: eye.copy()
    if _is_hermitian(A):
        w, V = np.linalg.eigh(A)
        Vh = V.conj().T
        return lambda t: (V * np.exp(1j * t * w)) @ Vh
    try:
        lam, V = np.linalg.eig(A)
        ok = np.linalg.cond(V) < EXP_EIG_COND_LIMIT
    except np.linalg.LinAlgError:
        ok = False
    if ok:
        Vinv = np.linalg.inv(V)
        return lambda t: (V * np.exp(1j * t * lam)) @ Vinv
    return lambda t: scipy.linalg.expm(1j * t * A)


def eig(M):
    """Eigenvalues and unit-norm eigenvectors of a square matrix."""
    M = check_square(M)
    try:
        lam, V = np.linalg.eig(M)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    norms = np.linalg.norm(V, axis=0)
    V = V / np.where(norms > 0, norms, 1.0)
    cond = float(np.linalg.cond(V)) if V.size else 1.0
    scale = norm2(M)
    res = norm2(M @ V - V * lam)
    return SpectralData(lam, V, cond, res / scale if scale > 0 else res)


def singular_values(M):
    M = as_cmatrix(M)
    if M.size == 0:
        return np.zeros(0)
    return np.linalg.svd(M, compute_uv=False)


def rank(M, tol=DEFAULT_TOL):
    """Number of singular values above ``tol * sigma_max``."""
    tol = check_tol(tol)
    s = singular_values(M)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


def _normalized(M):
    s = norm2(M)
    return M / s if s > 0 else M


def range_included(X, Y, tol=DEFAULT_TOL):
    """Whether range(X) is contained in range(Y), decided by rank([Y | X])."""
    X, Y = as_cmatrix(X), as_cmatrix(Y)
    Xn, Yn = _normalized(X), _normalized(Y)
    return rank(np.hstack([Yn, Xn]), tol) == rank(Yn, tol)


def null_included(X, Y, tol=DEFAULT_TOL):
    """Whether null(X) is contained in null(Y).

    Equivalent to the row space of Y lying inside the row space of X.
    """
    X, Y = as_cmatrix(X), as_cmatrix(Y)
    return range_included(Y.conj().T, X.conj().T, tol)


def same_range(X, Y, tol=DEFAULT_TOL):
    return range_included(X, Y, tol) and range_included(Y, X, tol)


def same_null(X, Y, tol=DEFAULT_TOL):
    return null_included(X, Y, tol) and null_included(Y, X, tol)


def range_basis(M, tol=DEFAULT_TOL):
    """Orthonormal basis of range(M) from a column-pivoted QR."""
    M = as_cmatrix(M)
    r = rank(M, tol)
    if r == 0:
        return np.zeros((M.shape[0], 0), dtype=np.complex128)
    Qf, _, _ = scipy.linalg.qr(M, pivoting=True, mode="economic")
    return Qf[:, :r]


def null_basis(M, tol=DEFAULT_TOL):
    """Orthonormal basis of null(M) from the SVD."""
    M = as_cmatrix(M)
    n = M.shape[1]
    r = rank(M, tol)
    _, _, Vh = np.linalg.svd(M, full_matrices=True)
    return Vh[r:].conj().T.reshape(n, n - r)
