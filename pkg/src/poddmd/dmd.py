"""Exact dynamic mode decomposition.

Snapshot pairs ``(Y, Y')`` are regressed onto the best-fit linear map
``A_y = Y' pinv(Y)``; its leading eigenpairs are recovered through the
rank-``k`` projection ``U^H Y' V Sigma^{-1}`` and the exact modes
``Y' V Sigma^{-1} W``.  Reconstruction uses continuous frequencies
``omega = log(lambda) / dt`` relative to the amplitude fitting time.
"""

import dataclasses
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from . import numkit
from .errors import DataError, DegenerateBasisError, RankError, ShapeError, StateError

__all__ = [
    "DmdModel",
    "exact_dmd",
    "fit_amplitudes",
    "dmd_evaluate",
    "dmd_predict_series",
    "orthonormalize_modes",
    "dmd_from_snapshots",
    "report_rows",
]


@dataclass(frozen=True)
class DmdModel:
    """Fitted DMD model.

    Attributes
    ----------
    modes : (n, k) complex ndarray
    discrete_eigs : (k,) complex ndarray
    frequencies : (k,) complex ndarray
        ``log(lambda) / dt``; ``nan`` where ``lambda == 0``.
    amplitudes : (k,) complex ndarray or None
    dt : float
    t_ref : float or None
        Time at which the amplitudes were fitted.
    real_data : bool
        True when the snapshots were real valued.
    """

    modes: np.ndarray
    discrete_eigs: np.ndarray
    frequencies: np.ndarray
    dt: float
    amplitudes: np.ndarray = None
    t_ref: float = None
    real_data: bool = True

    @property
    def rank(self):
        return self.discrete_eigs.size

    @property
    def n(self):
        return self.modes.shape[0]

    @property
    def nilpotent(self):
        """Mask of modes with a zero eigenvalue (left out of reconstruction)."""
        return np.isnan(self.frequencies)


def _order(eigs):
    mod = np.abs(eigs)
    scale = mod.max() if mod.size and mod.max() > 0 else 1.0
    mod_key = np.round(mod / scale, 12)
    phase = np.angle(eigs)
    # lexsort uses the last key as primary
    return np.lexsort((phase, np.round(np.abs(phase), 12), -mod_key))


def exact_dmd(Y, Yp, dt, rank):
    """Fit an exact DMD model (amplitudes unset).

    Parameters
    ----------
    Y, Yp : (n, m) array_like
        Snapshot pairs; column ``j`` of ``Yp`` follows column ``j`` of ``Y``
        after ``dt``.
    dt : float
        Sampling interval.
    rank : int
        Truncation rank ``k`` of the SVD of ``Y``.
    """
    Y = numkit.as_matrix(Y, "Y")
    Yp = numkit.as_matrix(Yp, "Yp")
    if Y.shape != Yp.shape:
        raise ShapeError(f"Y {Y.shape} and Yp {Yp.shape} differ in shape")
    if not dt > 0:
        raise ValueError("dt must be positive")
    real_data = not (np.iscomplexobj(Y) or np.iscomplexobj(Yp))
    kmax = min(Y.shape)
    if not 1 <= rank <= kmax:
        raise RankError(f"rank {rank} outside [1, {kmax}]", attainable=kmax)
    full = numkit.truncated_svd(Y, kmax)
    d = numkit.numerical_rank(full.singular_values, Y.shape)
    if d == 0:
        raise DataError("Y is numerically zero")
    if rank > d:
        raise RankError(f"rank {rank} exceeds numerical rank {d} of Y", attainable=d)
    U = full.left_vectors[:, :rank]
    s = full.singular_values[:rank]
    V = full.right_vectors[:, :rank]
    YpVS = (Yp @ V) / s
    Atilde = U.conj().T @ YpVS
    eigs, W = numkit.eig_dense(Atilde)
    order = _order(eigs)
    eigs, W = eigs[order], W[:, order]
    modes = YpVS @ W
    zero = np.abs(eigs) <= np.finfo(float).eps * max(np.abs(eigs).max(), 1e-300)
    with np.errstate(divide="ignore", invalid="ignore"):
        omega = np.log(eigs) / dt
    omega[zero] = np.nan
    return DmdModel(modes, eigs, omega, float(dt), real_data=real_data)


def fit_amplitudes(model, f_ref, t_ref=0.0):
    """Least-squares amplitudes ``b = pinv(modes) f_ref`` fitted at ``t_ref``."""
    f_ref = np.asarray(f_ref)
    if f_ref.ndim != 1 or f_ref.size != model.n:
        raise ShapeError(f"f_ref must have length {model.n}, got shape {f_ref.shape}")
    b = numkit.pseudoinverse_apply(model.modes, f_ref.astype(complex))
    return dataclasses.replace(model, amplitudes=b, t_ref=float(t_ref))


def _time_factors(model, times):
    if model.amplitudes is None:
        raise StateError("DMD amplitudes are not set; call fit_amplitudes first")
    tau = np.asarray(times, dtype=float) - model.t_ref
    omega = np.where(model.nilpotent, 0.0, model.frequencies)
    E = np.exp(np.multiply.outer(omega, tau))
    E[model.nilpotent] = 0.0
    return E


def dmd_evaluate(model, t):
    """``modes @ (exp(omega (t - t_ref)) * b)``."""
    E = _time_factors(model, [t])[:, 0]
    return model.modes @ (E * model.amplitudes)


def dmd_predict_series(model, times):
    """Column-stacked :func:`dmd_evaluate` over ``times``."""
    times = np.asarray(times, dtype=float).ravel()
    if times.size == 0:
        if model.amplitudes is None:
            raise StateError("DMD amplitudes are not set; call fit_amplitudes first")
        return np.zeros((model.n, 0), dtype=complex)
    E = _time_factors(model, times)
    return model.modes @ (E * model.amplitudes[:, None])


def orthonormalize_modes(model):
    """Orthonormal basis spanning the DMD modes.

    For real data each conjugate pair contributes its real and imaginary
    parts, so the result is real; complex data is orthonormalized as is.
    """
    modes = model.modes
    if model.real_data:
        eigs = model.discrete_eigs
        tol = 1e-12 * max(np.abs(eigs).max(), 1.0)
        cols = []
        for j, lam in enumerate(eigs):
            if abs(lam.imag) <= tol:
                cols.append(modes[:, j].real)
            elif lam.imag > 0:
                cols.extend([modes[:, j].real, modes[:, j].imag])
        basis = np.column_stack(cols)
    else:
        basis = modes
    Q, R = la.qr(basis, mode="economic")
    diag = np.abs(np.diag(R))
    if diag.size == 0 or diag.min() <= 1e-10 * diag.max():
        raise DegenerateBasisError("DMD modes lose rank during orthonormalization")
    if model.real_data:
        # positive diag(R): an orthonormal input comes back unchanged
        Q = Q * np.sign(np.diag(R))
    return Q


def dmd_from_snapshots(X, dt, rank, t0=0.0):
    """Algorithm-style convenience: split ``X`` into pairs, fit, set amplitudes.

    Amplitudes are fitted on the first column at time ``t0``.
    """
    X = numkit.as_matrix(X, "X")
    model = exact_dmd(X[:, :-1], X[:, 1:], dt, rank)
    return fit_amplitudes(model, X[:, 0], t0)


def report_rows(model):
    """Rows ``(index, Re lam, Im lam, Re omega, Im omega, |b|)``, 1-based."""
    b = model.amplitudes if model.amplitudes is not None else np.full(model.rank, np.nan)
    return [
        (i + 1, lam.real, lam.imag, om.real, om.imag, abs(bi))
        for i, (lam, om, bi) in enumerate(zip(model.discrete_eigs, model.frequencies, b))
    ]
