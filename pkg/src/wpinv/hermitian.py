"""Hermiticity and positivity of a matrix as an element of (M_n, norm).

An element is hermitian when ``|exp(itA)| = 1`` for every real ``t``. The
test below samples ``t`` on a symmetric grid; for the spectral norm the
exact criterion ``A = A*`` is evaluated alongside and any disagreement is
raised rather than silently resolved.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_square, check_tol, rel
from .exceptions import CriterionMismatch
from .geninv import as_weight
from .linalg import NormKind, exp_it_family, induced_norm, norm2

DEFAULT_T_MAX = 8.0
DEFAULT_STEPS = 129
DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class HermitianReport:
    verdict: bool
    max_deviation: float
    grid: np.ndarray
    norm_kind: NormKind
    tol: float
    # "exact-criterion" for the spectral norm, "grid-supported" otherwise
    certification: str
    deviations: np.ndarray

    def deviation_at(self, t):
        i = int(np.argmin(np.abs(self.grid - t)))
        return float(self.deviations[i])

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "max_deviation": self.max_deviation,
            "norm_kind": self.norm_kind.value,
            "tol": self.tol,
            "certification": self.certification,
            "grid": [float(t) for t in self.grid],
        }


def symmetric_grid(t_max, steps):
    """Uniform grid on [-t_max, t_max] that contains 0.

    An even ``steps`` is rounded up by one so the grid stays symmetric.
    """
    half = np.linspace(0.0, float(t_max), steps // 2 + 1)
    return np.concatenate([-half[:0:-1], half])


def is_banach_hermitian(
    A, kind=NormKind.INDUCED_2, t_max=DEFAULT_T_MAX, steps=DEFAULT_STEPS, tol=DEFAULT_TOL
):
    A = check_square(A, "A")
    kind = NormKind.parse(kind)
    tol = check_tol(tol)
    if kind is NormKind.FROBENIUS:
        raise ValueError("the Frobenius norm is not an algebra norm with |1| = 1")
    if steps < 8:
        raise ValueError("steps must be at least 8")
    if not t_max > 0:
        raise ValueError("t_max must be positive")
    grid = symmetric_grid(t_max, steps)
    expit = exp_it_family(A)
    values = np.array([induced_norm(expit(t), kind) for t in grid])
    deviations = np.abs(values - 1.0)
    max_dev = float(deviations.max())
    verdict = max_dev <= tol
    certification = "grid-supported"
    if kind is NormKind.INDUCED_2:
        certification = "exact-criterion"
        exact = rel(norm2(A - A.conj().T), norm2(A)) <= tol
        if exact != verdict:
            raise CriterionMismatch(
                f"grid verdict {verdict} (max deviation {max_dev:.3e}) disagrees with "
                f"self-adjointness verdict {exact}"
            )
    return HermitianReport(verdict, max_dev, grid, kind, tol, certification, deviations)


def is_positive(
    A, kind=NormKind.INDUCED_2, tol=DEFAULT_TOL, t_max=DEFAULT_T_MAX, steps=DEFAULT_STEPS
):
    """Hermitian with spectrum in the nonnegative reals."""
    A = check_square(A, "A")
    if not is_banach_hermitian(A, kind, t_max, steps, tol).verdict:
        return False
    lam = np.linalg.eigvals(A)
    scale = tol * norm2(A)
    return bool(np.all(lam.real >= -scale) and np.all(np.abs(lam.imag) <= scale))


def weighted_norm(x, W, kind=NormKind.INDUCED_2):
    """``|W^{1/2} x W^{-1/2}|`` for the chosen operator norm."""
    x = check_square(x, "x")
    W = as_weight(W, x.shape[0])
    return induced_norm(W.sqrt @ x @ W.inv_sqrt, kind)


def is_weighted_hermitian(x, W, tol=DEFAULT_TOL):
    """Self-adjointness in the W-weighted spectral-norm algebra: ``Wx`` hermitian."""
    x = check_square(x, "x")
    W = as_weight(W, x.shape[0])
    Wx = W.W @ x
    return rel(norm2(Wx.conj().T - Wx), norm2(Wx)) <= tol


@dataclass(frozen=True)
class FieldOfValuesSample:
    samples: np.ndarray
    max_imag: float
    min_real: float


def field_of_values_sample(A, n_samples=256, seed=0):
    """Sample ``x* A x`` over unit vectors ``x``.

    Uses ``n_samples`` Gaussian-normalized random vectors plus the
    eigenvectors of the hermitian part of ``A``.
    """
    A = check_square(A, "A")
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    n = A.shape[0]
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, n_samples)) + 1j * rng.standard_normal((n, n_samples))
    X /= np.linalg.norm(X, axis=0)
    _, V = np.linalg.eigh((A + A.conj().T) / 2)
    X = np.hstack([X, V])
    samples = np.einsum("ij,ij->j", X.conj(), A @ X)
    return FieldOfValuesSample(
        samples, float(np.abs(samples.imag).max()), float(samples.real.min())
    )
