"""Discrete empirical interpolation of a nonlinear term.

Given an orthonormal basis ``U`` of nonlinearity snapshots, DEIM picks ``k``
rows of the state and reconstructs the whole vector from those samples via
the precomputed lift ``U (S^T U)^{-1}``.  Indices are 0-based here; reports
add one.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from . import numkit
from .errors import DegenerateBasisError, ShapeError
from .pod import compute_pod_basis

__all__ = [
    "DeimOperator",
    "select_indices_lu",
    "select_indices_qr",
    "build_deim_operator",
    "deim_from_snapshots",
    "deim_apply",
    "deim_error_bound",
]

SELECTORS = ("lu", "qr")


@dataclass(frozen=True)
class DeimOperator:
    nonlinearity_modes: np.ndarray
    indices: np.ndarray
    lift: np.ndarray
    bound_constant: float

    @property
    def k(self):
        return self.indices.size

    @property
    def n(self):
        return self.lift.shape[0]


def _check_basis(U):
    U = numkit.as_matrix(U, "U")
    if U.shape[1] > U.shape[0]:
        raise ShapeError(f"basis has more columns ({U.shape[1]}) than rows")
    return U


def select_indices_lu(U):
    """Greedy DEIM index selection.

    The first index maximizes ``|U[:, 0]|``; each later index maximizes the
    residual of interpolating the next column from the columns already used.
    Ties go to the smallest row index.
    """
    U = _check_basis(U)
    n, k = U.shape
    first = np.abs(U[:, 0])
    if first.max() == 0:
        raise DegenerateBasisError("first basis column is zero")
    idx = [int(np.argmax(first))]
    for j in range(1, k):
        P = U[idx, :j]
        try:
            c = numkit.solve_linear(P, U[idx, j])
        except ArithmeticError as exc:
            raise DegenerateBasisError(
                f"interpolation system singular at step {j + 1}"
            ) from exc
        r = np.abs(U[:, j] - U[:, :j] @ c)
        if r.max() <= np.finfo(float).eps * max(1.0, np.abs(U[:, j]).max()) * n:
            raise DegenerateBasisError(f"basis column {j + 1} lies in span of earlier ones")
        idx.append(int(np.argmax(r)))
    return np.array(idx, dtype=int)


def select_indices_qr(U):
    """First ``k`` column pivots of a pivoted QR of ``U^T`` (Q-DEIM)."""
    U = _check_basis(U)
    n, k = U.shape
    _, R, piv = la.qr(U.conj().T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    if diag.size < k or diag[-1] <= np.finfo(float).eps * diag[0] * n:
        raise DegenerateBasisError("basis is numerically rank deficient")
    return np.asarray(piv[:k], dtype=int)


def build_deim_operator(U, indices):
    """Assemble lift ``U (S^T U)^{-1}`` and the bound constant."""
    U = _check_basis(U)
    indices = np.asarray(indices, dtype=int).ravel()
    if indices.size != U.shape[1]:
        raise ShapeError(f"{indices.size} indices for a rank-{U.shape[1]} basis")
    if np.unique(indices).size != indices.size:
        raise DegenerateBasisError("interpolation indices are not distinct")
    if indices.min() < 0 or indices.max() >= U.shape[0]:
        raise ShapeError("interpolation index out of range")
    SU = U[indices]
    smin = np.linalg.svd(SU, compute_uv=False)[-1]
    if smin <= np.finfo(float).eps * max(1.0, np.linalg.norm(SU, 2)) * SU.shape[0]:
        raise DegenerateBasisError("S^T U is singular for these indices")
    # lift = U @ inv(SU) computed as a solve with the transpose
    lift = numkit.solve_linear(SU.T, U.T).T
    return DeimOperator(U, indices, lift, float(1.0 / smin))


def deim_from_snapshots(F, k, selector="lu"):
    """DEIM operator from nonlinearity snapshots ``F`` (unweighted POD)."""
    if selector not in SELECTORS:
        raise ValueError(f"selector must be one of {SELECTORS}, got {selector!r}")
    U = compute_pod_basis(F, k).modes
    pick = select_indices_lu if selector == "lu" else select_indices_qr
    return build_deim_operator(U, pick(U))


def deim_apply(op, f_at_indices):
    """Reconstruct the full vector from its samples at ``op.indices``."""
    f_at_indices = np.asarray(f_at_indices)
    if f_at_indices.shape[0] != op.k:
        raise ShapeError(f"expected {op.k} samples, got {f_at_indices.shape[0]}")
    return op.lift @ f_at_indices


def deim_error_bound(op, f):
    """Return ``(||f - f_deim||_2, c ||(I - U U^H) f||_2)``."""
    f = np.asarray(f)
    U = op.nonlinearity_modes
    actual = np.linalg.norm(f - deim_apply(op, f[op.indices]))
    residual = np.linalg.norm(f - U @ (U.conj().T @ f))
    return float(actual), float(op.bound_constant * residual)
