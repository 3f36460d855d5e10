"""Dense linear-algebra core.

Thin, checked wrappers around LAPACK (through numpy / scipy) that work for
both real and complex double precision.  Every other module goes through
these functions so that rank conventions and error reporting stay uniform.
"""

import warnings
from typing import NamedTuple

import numpy as np
import scipy.linalg as la

from .errors import (
    DataError,
    NumericalFailure,
    RankError,
    ShapeError,
    SingularMatrixError,
)

__all__ = [
    "SvdResult",
    "EigResult",
    "as_matrix",
    "rank_tolerance",
    "numerical_rank",
    "truncated_svd",
    "eig_dense",
    "pseudoinverse_apply",
    "solve_linear",
]

EPS = np.finfo(float).eps


class SvdResult(NamedTuple):
    left_vectors: np.ndarray
    singular_values: np.ndarray
    right_vectors: np.ndarray


class EigResult(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(A, name="A"):
    """Return ``A`` as a finite 2D float or complex array."""
    A = np.asarray(A)
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise ShapeError(f"{name} must be a nonempty 2D array, got shape {A.shape}")
    if not np.iscomplexobj(A):
        A = A.astype(float, copy=False)
    if not np.all(np.isfinite(A)):
        raise DataError(f"{name} contains non-finite entries")
    return A


def rank_tolerance(singular_values, shape):
    """Cutoff below which singular values are treated as zero."""
    s = np.asarray(singular_values)
    if s.size == 0:
        return 0.0
    return float(s[0]) * max(shape) * EPS


def numerical_rank(singular_values, shape):
    s = np.asarray(singular_values)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.count_nonzero(s > rank_tolerance(s, shape)))


def truncated_svd(A, k):
    """Top-``k`` singular triplets of ``A``.

    Parameters
    ----------
    A : (n, m) array_like
        Real or complex matrix.
    k : int
        Number of triplets, ``1 <= k <= min(n, m)``.

    Returns
    -------
    SvdResult
        ``left_vectors`` (n, k), ``singular_values`` (k,) nonincreasing and
        ``right_vectors`` (m, k) so that ``A ~ U @ diag(s) @ V.conj().T``.
    """
    A = as_matrix(A)
    kmax = min(A.shape)
    if not 1 <= k <= kmax:
        raise RankError(f"k={k} outside [1, {kmax}]", attainable=kmax)
    try:
        U, s, Vh = la.svd(A, full_matrices=False, check_finite=False)
    except la.LinAlgError:
        U, s, Vh = la.svd(
            A, full_matrices=False, check_finite=False, lapack_driver="gesvd"
        )
    return SvdResult(U[:, :k], s[:k], Vh[:k].conj().T)


def eig_dense(A):
    """Eigenpairs of a small dense square matrix.

    No ordering is imposed on the result; callers sort as they need.
    """
    A = as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise ShapeError(f"eig_dense needs a square matrix, got {A.shape}")
    try:
        w, V = la.eig(A, check_finite=False)
    except la.LinAlgError as exc:
        raise NumericalFailure(f"eigensolver did not converge: {exc}") from exc
    return EigResult(w.astype(complex), V.astype(complex))


def pseudoinverse_apply(A, b):
    """Minimum-norm least-squares solution ``pinv(A) @ b``.

    Singular values below ``s[0] * max(A.shape) * eps`` are discarded.
    ``b`` may be a vector or a matrix of right-hand sides.
    """
    A = as_matrix(A)
    b = np.asarray(b)
    if b.shape[0] != A.shape[0]:
        raise ShapeError(f"A has {A.shape[0]} rows but b has {b.shape[0]}")
    U, s, Vh = la.svd(A, full_matrices=False, check_finite=False)
    r = numerical_rank(s, A.shape)
    if r == 0:
        return np.zeros((A.shape[1],) + b.shape[1:], dtype=np.result_type(A, b))
    coef = U[:, :r].conj().T @ b
    coef = coef / (s[:r] if b.ndim == 1 else s[:r, None])
    return Vh[:r].conj().T @ coef


def solve_linear(A, B):
    """Solve ``A X = B`` for square, nonsingular ``A``."""
    A = as_matrix(A)
    B = np.asarray(B)
    n = A.shape[0]
    if A.shape[1] != n:
        raise ShapeError(f"solve_linear needs a square matrix, got {A.shape}")
    if B.shape[0] != n:
        raise ShapeError(f"A is {n}x{n} but B has {B.shape[0]} rows")
    with warnings.catch_warnings():
        # singularity is reported below with a condition estimate
        warnings.simplefilter("ignore", la.LinAlgWarning)
        lu, piv = la.lu_factor(A, check_finite=False)
    anorm = np.linalg.norm(A, 1)
    rcond = _rcond_from_lu(lu, anorm)
    if rcond < EPS:
        cond = np.inf if rcond == 0 else 1.0 / rcond
        raise SingularMatrixError(
            f"matrix is singular to working precision (cond ~ {cond:.3e})",
            condition=cond,
        )
    return la.lu_solve((lu, piv), B, check_finite=False)


def _rcond_from_lu(lu, anorm):
    if anorm == 0 or np.any(np.diag(lu) == 0):
        return 0.0
    gecon = la.get_lapack_funcs("gecon", (lu,))
    rcond, info = gecon(lu, anorm, norm="1")
    return float(rcond)
