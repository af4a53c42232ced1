"""Seeded instance generators and brute-force oracles.

All randomness goes through ``numpy.random.Generator`` (PCG64) seeded by
``numpy.random.SeedSequence``; an identical :class:`GenSpec` yields a
bit-identical result on one platform.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_square
from .exceptions import DimensionMismatch, NoSolution
from .geninv import Weight, as_weight

# condition number of the random change of basis used by the index-1 and
# weighted-EP generators
BASIS_COND = 10.0
# condition number of the diagonal blocks of generated weights
BLOCK_WEIGHT_COND = 10.0


@dataclass(frozen=True)
class GenSpec:
    n: int
    rank: int
    cond_target: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.rank <= self.n:
            raise ValueError(f"rank {self.rank} outside [0, {self.n}]")
        if not self.cond_target >= 1:
            raise ValueError("cond_target must be >= 1")

    def rng(self, *stream):
        return make_rng(self.seed, *stream)


def make_rng(seed, *stream):
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, stream)]))


def complex_gaussian(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_unitary(n, rng):
    """Haar-distributed unitary from the QR of a complex Gaussian matrix."""
    Z = complex_gaussian(rng, (n, n))
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))


def log_spectrum(k, cond, rng):
    """``k`` values in [1/cond, 1], log-uniform, with both ends pinned when k >= 2."""
    if k == 0:
        return np.zeros(0)
    logs = rng.uniform(-np.log(cond), 0.0, size=k)
    if k >= 2:
        logs[0], logs[1] = 0.0, -np.log(cond)
    return np.sort(np.exp(logs))[::-1]


def random_matrix_with_cond(n, cond, rng):
    U, V = random_unitary(n, rng), random_unitary(n, rng)
    return (U * log_spectrum(n, cond, rng)) @ V.conj().T


def random_hpd_matrix(n, cond, rng):
    if cond == 1:
        return np.eye(n, dtype=np.complex128)
    Q = random_unitary(n, rng)
    d = cond * log_spectrum(n, cond, rng)
    W = (Q * d) @ Q.conj().T
    return (W + W.conj().T) / 2


def random_hpd(spec):
    """HPD weight with spectrum in [1, cond_target] (both ends hit for n >= 2)."""
    if spec.rank != spec.n:
        raise ValueError("random_hpd needs rank == n")
    return Weight.from_matrix(random_hpd_matrix(spec.n, spec.cond_target, spec.rng(1)))


def random_fixed_rank(spec):
    """Product of random n x r and r x n full-rank factors.

    The nonzero singular values are log-uniform in [1/cond_target, 1].
    """
    rng = spec.rng(2)
    n, r = spec.n, spec.rank
    U, V = random_unitary(n, rng), random_unitary(n, rng)
    s = log_spectrum(r, spec.cond_target, rng)
    return (U[:, :r] * s) @ V[:, :r].conj().T


def _index_one_parts(n, r, cond, rng):
    S = random_matrix_with_cond(n, BASIS_COND, rng)
    C = random_matrix_with_cond(r, cond, rng) if r else np.zeros((0, 0))
    return S, C


def block_diag(*blocks):
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=np.complex128)
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i : i + k, i : i + k] = b
        i += k
    return out


def index_one_from_blocks(S, C):
    """``S diag(C, 0) S^{-1}``."""
    S = check_square(S, "S")
    C = check_square(C, "C") if np.size(C) else np.zeros((0, 0), dtype=np.complex128)
    n, r = S.shape[0], C.shape[0]
    core = block_diag(C, np.zeros((n - r, n - r)))
    return np.linalg.solve(S.T, (S @ core).T).T


def random_index_one(spec):
    """``S diag(C, 0) S^{-1}`` with random invertible ``C`` (r x r) and ``S``."""
    S, C = _index_one_parts(spec.n, spec.rank, spec.cond_target, spec.rng(3))
    return index_one_from_blocks(S, C)


def weighted_ep_from_blocks(S, C, E_blocks, F_blocks):
    """Assemble a weighted-EP triple from a basis and block data.

    ``A = S diag(C, 0) S^{-1}`` and each weight is
    ``S^{-*} diag(W1, W2) S^{-1}``, so the projector onto range(A) along
    null(A) is hermitian in both weighted algebras.
    """
    S = check_square(S, "S")
    A = index_one_from_blocks(S, C)
    Sinv = np.linalg.inv(S)

    def adapted(blocks):
        W = Sinv.conj().T @ block_diag(*(check_square(b) for b in blocks if np.size(b))) @ Sinv
        return Weight.from_matrix((W + W.conj().T) / 2)

    return A, adapted(E_blocks), adapted(F_blocks)


def random_weighted_ep(n, r, seed, cond=10.0):
    """Random ``(A, E, F)`` with ``A`` weighted EP for weights ``E``, ``F``."""
    if not 1 <= r <= n:
        raise ValueError("need 1 <= r <= n")
    rng = make_rng(seed, 4, n, r)
    S, C = _index_one_parts(n, r, cond, rng)
    k = n - r
    E_blocks = [random_hpd_matrix(r, BLOCK_WEIGHT_COND, rng)]
    F_blocks = [random_hpd_matrix(r, BLOCK_WEIGHT_COND, rng)]
    if k:
        E_blocks.append(random_hpd_matrix(k, BLOCK_WEIGHT_COND, rng))
        F_blocks.append(random_hpd_matrix(k, BLOCK_WEIGHT_COND, rng))
    return weighted_ep_from_blocks(S, C, E_blocks, F_blocks)


def random_index_one_triple(n, r, seed, cond=10.0, weight_cond=100.0):
    """Index-1 ``A`` with unrelated random weights; generically not weighted EP."""
    rng = make_rng(seed, 5, n, r)
    S, C = _index_one_parts(n, r, cond, rng)
    A = index_one_from_blocks(S, C)
    E = Weight.from_matrix(random_hpd_matrix(n, weight_cond, rng))
    F = Weight.from_matrix(random_hpd_matrix(n, weight_cond, rng))
    return A, E, F


def oracle_penrose_solve_2x2(A, E=None, F=None, rank_tol=1e-13, ambiguity=1e-9):
    """Weighted Moore-Penrose inverse of a 2x2 matrix by direct elimination.

    Rank 0 gives 0 and rank 2 the adjugate inverse. For rank one write
    ``A = u v*``: ``BAB = B`` makes ``B = x y*``, E-hermiticity of ``AB``
    forces ``y`` parallel to ``E u``, F-hermiticity of ``BA`` forces ``x``
    parallel to ``F^{-1} v``, and ``ABA = A`` fixes the scale, giving
    ``B = F^{-1} v u* E / ((u* E u)(v* F^{-1} v))``. No SVD is used.

    Raises
    ------
    NoSolution
        When the relative determinant sits between the rank-one threshold
        and ``ambiguity``, so neither branch is numerically trustworthy.
    """
    A = check_square(A, "A")
    if A.shape != (2, 2):
        raise DimensionMismatch("oracle is defined for 2x2 matrices only")
    E, F = as_weight(E, 2), as_weight(F, 2)
    scale = float(np.sum(np.abs(A) ** 2))
    if scale == 0:
        return np.zeros((2, 2), dtype=np.complex128)
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    rdet = abs(det) / scale
    if rdet > ambiguity:
        adj = np.array([[A[1, 1], -A[0, 1]], [-A[1, 0], A[0, 0]]])
        return adj / det
    if rdet > rank_tol:
        raise NoSolution(f"relative determinant {rdet:.2e} leaves the rank ambiguous")
    # A = u v*: u is the dominant column, v* the matching coefficients
    j = int(np.argmax(np.abs(A).max(axis=0)))
    u = A[:, j]
    i = int(np.argmax(np.abs(u)))
    v_conj = A[i, :] / u[i]
    v = v_conj.conj()
    Finv = np.array([[F.W[1, 1], -F.W[0, 1]], [-F.W[1, 0], F.W[0, 0]]]) / (
        F.W[0, 0] * F.W[1, 1] - F.W[0, 1] * F.W[1, 0]
    )
    x = Finv @ v
    y_conj = u.conj() @ E.W
    denom = (u.conj() @ E.W @ u) * (v.conj() @ Finv @ v)
    if abs(denom) == 0:
        raise NoSolution("degenerate rank-one factorization")
    return np.outer(x, y_conj) / denom


def instance_seed(seed, index):
    """Integer seed for instance ``index`` of a corpus seeded by ``seed``."""
    return int(np.random.SeedSequence([int(seed), int(index)]).generate_state(1)[0])


def penrose_instance(n, seed, max_cond=1e4, max_weight_cond=1e3):
    """Random ``(A, E, F)``: rank uniform in 0..n, log-uniform conditioning."""
    rng = make_rng(seed, 6, n)
    r = int(rng.integers(0, n + 1))
    cond = float(10 ** rng.uniform(0, np.log10(max_cond)))
    ce, cf = 10 ** rng.uniform(0, np.log10(max_weight_cond), size=2)
    A = random_fixed_rank(GenSpec(n, r, cond, seed))
    E = random_hpd(GenSpec(n, n, float(ce), seed))
    F = random_hpd(GenSpec(n, n, float(cf), seed + 1))
    return A, E, F


def block_instance(n, seed, weight_cond=1e2):
    """Block upper-triangular ``T`` with block-diagonal HPD weights.

    The coupling block is ``T11 X T22`` (or zero), which keeps the leading
    block invariant for the weighted inverse as well.
    """
    if n < 2:
        raise ValueError("block instances need n >= 2")
    rng = make_rng(seed, 8, n)
    k = int(rng.integers(1, n))
    m = n - k
    r1, r2 = int(rng.integers(0, k + 1)), int(rng.integers(0, m + 1))
    T11 = random_fixed_rank(GenSpec(k, r1, 10.0, seed))
    T22 = random_fixed_rank(GenSpec(m, r2, 10.0, seed + 1))
    if rng.random() < 0.5:
        T12 = T11 @ complex_gaussian(rng, (k, m)) @ T22
    else:
        T12 = np.zeros((k, m), dtype=np.complex128)
    T = np.block([[T11, T12], [np.zeros((m, k)), T22]])
    E = block_diag(random_hpd_matrix(k, weight_cond, rng), random_hpd_matrix(m, weight_cond, rng))
    F = block_diag(random_hpd_matrix(k, weight_cond, rng), random_hpd_matrix(m, weight_cond, rng))
    return T, E, F, k


def hermitian_instance(n, seed, constructed):
    """A hermitian matrix when ``constructed``, otherwise a complex Gaussian one."""
    rng = make_rng(seed, 9, n)
    X = complex_gaussian(rng, (n, n))
    if constructed:
        return (X + X.conj().T) / 2
    return X


def ep_corpus_instance(n, seed, constructed):
    """Weighted-EP triple when ``constructed``, else a generic index-1 triple.

    Generic triples use rank ``1..n-1`` so they are singular (invertible
    matrices are weighted EP for every pair of weights).
    """
    rng = make_rng(seed, 10, n)
    if constructed:
        r = int(rng.integers(1, n + 1))
        return random_weighted_ep(n, r, seed)
    r = int(rng.integers(1, n))
    return random_index_one_triple(n, r, seed)
