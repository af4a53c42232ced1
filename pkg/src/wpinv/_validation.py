"""Input validation helpers shared by the functional API and the estimators."""

import numpy as np

from .exceptions import DimensionMismatch


def as_cmatrix(M, name="M"):
    """Return ``M`` as a 2-D complex128 array, rejecting NaN/Inf."""
    arr = np.asarray(M)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {arr.shape}")
    arr = arr.astype(np.complex128, copy=False)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf")
    return arr


def check_square(M, name="M"):
    arr = as_cmatrix(M, name)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {arr.shape}")
    return arr


def check_same_shape(A, B, names=("A", "B")):
    if A.shape != B.shape:
        raise DimensionMismatch(
            f"{names[0]} has shape {A.shape} but {names[1]} has shape {B.shape}"
        )


def check_tol(tol):
    tol = float(tol)
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    return tol


def rel(err, scale):
    """``err / scale`` with ``0/0`` read as 0 (both sides exactly zero)."""
    if scale > 0:
        return float(err / scale)
    return float(err)
