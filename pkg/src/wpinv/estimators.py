"""scikit-learn style wrappers around the functional API.

The estimators are fitted on a single square matrix ``A`` rather than on a
sample matrix, so ``fit(A)`` stores the computed inverse and ``transform``
applies it to right-hand sides given as rows.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import as_cmatrix, check_square
from .ep import ClauseParams, DEFAULT_EP_TOL, characterization_battery
from .exceptions import DimensionMismatch
from .geninv import group_inverse, pinv_from_projectors, projectors_of, weighted_pinv
from .linalg import DEFAULT_TOL


def _rows(Y, n):
    Y = as_cmatrix(np.atleast_2d(Y), "Y")
    if Y.shape[1] != n:
        raise DimensionMismatch(f"expected rows of length {n}, got {Y.shape[1]}")
    return Y


class WeightedPinv(TransformerMixin, BaseEstimator):
    """Weighted Moore-Penrose inverse as a transformer.

    Parameters
    ----------
    E, F : array_like or None
        Hermitian positive definite weights; ``None`` is the identity.
    tol : float
        Relative singular-value cutoff.
    via : {"formula", "projectors"}
        Route used to compute ``pinv_``.

    Attributes
    ----------
    pinv_ : ndarray
    P_, Q_ : ndarray
        ``A @ pinv_`` and ``pinv_ @ A``.
    residuals_ : tuple of float
        The four relative Penrose residuals.
    rank_ : int
    """

    def __init__(self, E=None, F=None, tol=DEFAULT_TOL, via="formula"):
        self.E = E
        self.F = F
        self.tol = tol
        self.via = via

    def fit(self, A, y=None):
        if self.via not in ("formula", "projectors"):
            raise ValueError(f"via must be 'formula' or 'projectors', got {self.via!r}")
        A = check_square(A, "A")
        res = weighted_pinv(A, self.E, self.F, self.tol)
        B = res.B
        if self.via == "projectors":
            P, Q = projectors_of(A, self.E, self.F, self.tol)
            B = pinv_from_projectors(A, P, Q)
        self.pinv_ = B
        self.P_, self.Q_ = A @ B, B @ A
        self.residuals_ = res.residuals
        self.rank_ = res.rank
        self.n_features_in_ = A.shape[0]
        return self

    def transform(self, Y):
        """Apply the inverse to each row of ``Y``."""
        check_is_fitted(self, "pinv_")
        return _rows(Y, self.n_features_in_) @ self.pinv_.T


class GroupInverse(TransformerMixin, BaseEstimator):
    """Group inverse as a transformer; ``exists_`` is False for index > 1."""

    def __init__(self, tol=DEFAULT_TOL):
        self.tol = tol

    def fit(self, A, y=None):
        g = group_inverse(A, self.tol)
        self.exists_ = g.exists
        self.sharp_ = g.sharp
        self.n_features_in_ = check_square(A, "A").shape[0]
        return self

    def transform(self, Y):
        check_is_fitted(self, "exists_")
        if not self.exists_:
            raise ValueError("the fitted matrix has no group inverse")
        return _rows(Y, self.n_features_in_) @ self.sharp_.T


class WeightedEPCharacterization(BaseEstimator):
    """Runs the weighted-EP clause battery on a fitted matrix.

    ``predict`` returns the EP verdict of each matrix in a sequence.
    """

    def __init__(self, E=None, F=None, k=2, l=2, lam=1 + 1j, tol=DEFAULT_EP_TOL, seed=0):
        self.E = E
        self.F = F
        self.k = k
        self.l = l
        self.lam = lam
        self.tol = tol
        self.seed = seed

    def _battery(self, A):
        params = ClauseParams(self.k, self.l, self.lam, self.tol)
        return characterization_battery(A, self.E, self.F, params, seed=self.seed)

    def fit(self, A, y=None):
        self.report_ = self._battery(A)
        self.consensus_ = self.report_.consensus
        self.ep_verdict_ = self.report_.ep_verdict
        return self

    def predict(self, As):
        return np.array([self._battery(A).ep_verdict for A in As])
