"""Dense linear algebra kernels: orthonormal cosine basis, seeded Gaussian
matrices, null-space construction, least squares and spectral estimates.

Everything here is pure; randomized helpers are deterministic functions of
the stream they are handed.
"""

import numpy as np

from .errors import DegenerateKeyError, DimensionMismatchError, InvalidDimensionError
from .rng import as_generator
from .validation import as_float_matrix, as_float_vector


def dct_basis(n: int) -> np.ndarray:
    """Orthonormal type-II cosine basis as an n-by-n matrix.

    Column k holds the frequency-k basis vector, so for a signal ``x`` the
    coefficient vector is ``basis.T @ x`` and synthesis is ``basis @ s``.
    """
    if n < 1:
        raise InvalidDimensionError(f"basis dimension must be >= 1, got {n}")
    j = np.arange(n)[:, None]
    k = np.arange(n)[None, :]
    basis = np.cos(np.pi * (2 * j + 1) * k / (2 * n))
    basis[:, 0] *= np.sqrt(1.0 / n)
    if n > 1:
        basis[:, 1:] *= np.sqrt(2.0 / n)
    return basis


def gaussian_matrix(rows: int, cols: int, rng) -> np.ndarray:
    """Standard-normal i.i.d. matrix, deterministic given the stream."""
    if rows < 1 or cols < 1:
        raise InvalidDimensionError(
            f"matrix dimensions must be >= 1, got {rows}x{cols}")
    return as_generator(rng).standard_normal((rows, cols))


def column_l2_norms(mat) -> np.ndarray:
    """Euclidean norm of every column."""
    arr = as_float_matrix(mat, "matrix")
    return np.linalg.norm(arr, axis=0)


def orthonormal_null_basis(b_mat) -> np.ndarray:
    """Matrix F with orthonormal rows spanning the left null space of B.

    For B of shape (m, M) with full column rank, F has shape (m - M, m),
    F @ B == 0 and F @ F.T == I.  Built from a full orthogonal (SVD)
    decomposition, which is rank revealing and yields orthonormal rows
    directly.
    """
    b = as_float_matrix(b_mat, "B")
    m, k = b.shape
    if m <= k:
        raise DegenerateKeyError(
            f"left null space is trivial: B is {m}x{k} with m <= M")
    u, s, _ = np.linalg.svd(b, full_matrices=True)
    tol = max(m, k) * np.finfo(float).eps * (s[0] if s.size else 0.0)
    rank = int(np.sum(s > tol))
    if rank < k:
        raise DegenerateKeyError(
            f"B is rank deficient: rank {rank} < {k} columns")
    return u[:, k:].T.copy()


def least_squares(b_mat, r) -> np.ndarray:
    """Minimum-residual solution of B w ~ r for full-column-rank B.

    Solved through an orthogonal factorization rather than the normal
    equations; the residual is orthogonal to the columns of B.
    """
    b = as_float_matrix(b_mat, "B")
    rhs = as_float_vector(r, "r")
    if b.shape[0] != rhs.shape[0]:
        raise DimensionMismatchError(
            f"B has {b.shape[0]} rows but r has length {rhs.shape[0]}")
    sol, _, rank, _ = np.linalg.lstsq(b, rhs, rcond=None)
    if rank < b.shape[1]:
        raise DegenerateKeyError(
            f"least squares design is rank deficient: rank {rank} < {b.shape[1]}")
    return sol


def spectral_norm_sq(mat, iters: int = 200, tol: float = 1e-13) -> float:
    """Largest eigenvalue of ``mat.T @ mat`` by alternating power iteration.

    Deterministic start vector; returns the Rayleigh quotient after
    convergence of the eigenvalue estimate to relative ``tol`` or after
    ``iters`` rounds, whichever comes first.
    """
    a = as_float_matrix(mat, "matrix")
    n = a.shape[1]
    # Ramped start avoids accidental orthogonality to the top eigenvector.
    v = 1.0 + np.arange(n) / max(n, 1)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(iters):
        w = a.T @ (a @ v)
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v = w / norm
        new_lam = float(v @ (a.T @ (a @ v)))
        if abs(new_lam - lam) <= tol * max(1.0, abs(new_lam)):
            lam = new_lam
            break
        lam = new_lam
    return lam


def sigma_max(mat, iters: int = 500, tol: float = 1e-14) -> float:
    """Largest singular value via power iteration on the Gram matrix."""
    return float(np.sqrt(spectral_norm_sq(mat, iters=iters, tol=tol)))
