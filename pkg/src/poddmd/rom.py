"""Galerkin reduced models with full, DEIM or DMD treatment of the nonlinearity.

All three reduced systems share the linear part ``(M_l, A_l, y0_l)`` and are
advanced by the same semi-implicit Euler step as the full model.  They
differ only in the closure that supplies the projected nonlinear term.
"""

import time
from dataclasses import dataclass

import numpy as np

from . import numkit
from .dmd import DmdModel
from .deim import DeimOperator
from .errors import (
    DivergenceError,
    ShapeError,
    SingularMatrixError,
    StateError,
)
from .pod import PodBasis, _apply_weights, project

__all__ = [
    "ReducedLinearPart",
    "ReducedTrajectory",
    "FullLiftClosure",
    "DeimClosure",
    "DmdClosure",
    "galerkin_reduce",
    "integrate_reduced",
    "evaluate_closure",
    "reconstruct_full",
]


@dataclass(frozen=True)
class ReducedLinearPart:
    mass_reduced: np.ndarray
    stiffness_reduced: np.ndarray
    initial_reduced: np.ndarray

    @property
    def ell(self):
        return self.initial_reduced.size


@dataclass
class ReducedTrajectory:
    reduced_states: np.ndarray
    times: np.ndarray
    online_seconds: float
    nonlinearity_eval_count: int
    max_imag: float = 0.0


def _weighted_modes(basis):
    """``W Psi``, so that ``(W Psi)^H x`` is the W-projection of ``x``."""
    return _apply_weights(basis.weights, basis.modes)


def galerkin_reduce(M, A, basis: PodBasis, y0) -> ReducedLinearPart:
    """Project ``M``, ``A`` and ``y0`` onto the basis.

    ``M=None`` stands for the identity.  ``M`` and ``A`` may be sparse.
    """
    Psi = basis.modes
    if A.shape != (basis.n, basis.n):
        raise ShapeError(f"operator shape {A.shape} does not match n={basis.n}")
    WPsi_H = _weighted_modes(basis).conj().T
    Al = np.asarray(WPsi_H @ (A @ Psi))
    if M is None:
        Ml = np.asarray(WPsi_H @ Psi)
    else:
        Ml = np.asarray(WPsi_H @ (M @ Psi))
    s = np.linalg.svd(Ml, compute_uv=False)
    if s[-1] <= np.finfo(float).eps * s[0] * Ml.shape[0]:
        raise SingularMatrixError("reduced mass matrix is singular", condition=np.inf)
    return ReducedLinearPart(Ml, Al, project(basis, np.asarray(y0)))


class FullLiftClosure:
    """Lift, evaluate the full nonlinearity, project back (one full call)."""

    def __init__(self, basis, nonlinearity):
        self.modes = basis.modes
        self.proj = _weighted_modes(basis).conj().T
        self.f = nonlinearity
        self.eval_count = 0
        self.ell = basis.rank

    def evaluate(self, t, y_reduced):
        self.eval_count += 1
        return self.proj @ self.f(t, self.modes @ y_reduced)


class DeimClosure:
    """Evaluate the nonlinearity at ``k`` interpolation points only.

    Component evaluations gather the declared stencil rows of the lifted
    state; the count grows by ``k`` per call.
    """

    def __init__(self, basis, op: DeimOperator, nonlinearity):
        if op.n != basis.n:
            raise ShapeError("DEIM operator and basis have different n")
        self.coupling = _weighted_modes(basis).conj().T @ op.lift
        rows, self.pos = nonlinearity.sampling_plan(op.indices)
        self.gather = basis.modes[rows]
        self.rows = rows
        self.f = nonlinearity
        self.k = op.k
        self.eval_count = 0
        self.ell = basis.rank

    def evaluate(self, t, y_reduced):
        self.eval_count += self.k
        fk = self.f.evaluate_sampled(t, self.gather @ y_reduced, self.pos)
        return self.coupling @ fk


class DmdClosure:
    """``(Psi^H W Psi_dmd) diag(exp(omega (t - t_ref))) b``; never calls f."""

    def __init__(self, basis, model: DmdModel, real=True):
        if model.amplitudes is None:
            raise StateError("DMD amplitudes are not set; call fit_amplitudes first")
        if model.n != basis.n:
            raise ShapeError("DMD model and basis have different n")
        coupling = _weighted_modes(basis).conj().T @ model.modes
        keep = ~model.nilpotent
        self.weighted = (coupling * model.amplitudes)[:, keep]
        self.omega = model.frequencies[keep]
        self.t_ref = model.t_ref
        self.real = real
        self.eval_count = 0
        self.ell = basis.rank
        self.k = model.rank

    def evaluate(self, t, y_reduced):
        r = self.weighted @ np.exp(self.omega * (t - self.t_ref))
        return r.real if self.real else r

    def imag_residue(self, times):
        """Largest imaginary part discarded over ``times`` (real runs only)."""
        if not self.real or self.weighted.size == 0 or len(times) == 0:
            return 0.0
        E = np.exp(np.multiply.outer(self.omega, np.asarray(times) - self.t_ref))
        return float(np.abs((self.weighted @ E).imag).max())


def evaluate_closure(closure, t, y_reduced):
    y_reduced = np.asarray(y_reduced)
    if y_reduced.shape != (closure.ell,):
        raise ShapeError(f"reduced state must have shape ({closure.ell},)")
    return closure.evaluate(t, y_reduced)


def integrate_reduced(lin: ReducedLinearPart, closure, dt, steps, t0=0.0):
    """Semi-implicit Euler on the reduced system.

    The ``ell x ell`` iteration matrix ``M_l - dt A_l`` is factorized once;
    each step costs two small mat-vecs plus one closure evaluation.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    if closure is not None and closure.ell != lin.ell:
        raise ShapeError(f"closure has rank {closure.ell}, linear part {lin.ell}")
    ell = lin.ell
    K = lin.mass_reduced - dt * lin.stiffness_reduced
    try:
        PQ = numkit.solve_linear(K, np.hstack([lin.mass_reduced, dt * np.eye(ell)]))
    except SingularMatrixError as exc:
        raise SingularMatrixError(
            f"iteration matrix singular for dt={dt}", condition=exc.condition
        ) from exc
    P, Q = PQ[:, :ell], PQ[:, ell:]
    complex_run = (
        np.iscomplexobj(PQ)
        or np.iscomplexobj(lin.initial_reduced)
        or (isinstance(closure, DmdClosure) and not closure.real)
    )
    dtype = complex if complex_run else float
    P, Q = P.astype(dtype), Q.astype(dtype)
    times = t0 + dt * np.arange(steps + 1)
    Y = np.empty((ell, steps + 1), dtype=dtype)
    y = lin.initial_reduced.astype(dtype)
    Y[:, 0] = y
    count0 = closure.eval_count if closure is not None else 0
    start = time.perf_counter()
    with np.errstate(over="ignore", invalid="ignore"):
        if closure is None:
            for j in range(steps):
                y = P @ y
                Y[:, j + 1] = y
        else:
            evaluate = closure.evaluate
            for j in range(steps):
                y = P @ y + Q @ evaluate(times[j], y)
                Y[:, j + 1] = y
    seconds = time.perf_counter() - start
    bad = ~np.all(np.isfinite(Y), axis=0)
    if bad.any():
        step = int(np.argmax(bad))
        raise DivergenceError(f"reduced solution blew up at step {step}", step=step)
    count = (closure.eval_count - count0) if closure is not None else 0
    max_imag = 0.0
    if isinstance(closure, DmdClosure):
        # off the timed path: the closure depends on t only
        max_imag = closure.imag_residue(times[:steps])
    return ReducedTrajectory(Y, times, seconds, count, max_imag)


def reconstruct_full(basis, traj: ReducedTrajectory):
    if traj.reduced_states.shape[0] != basis.rank:
        raise ShapeError("trajectory rank does not match basis rank")
    return basis.modes @ traj.reduced_states
