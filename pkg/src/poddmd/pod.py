"""Proper orthogonal decomposition with an optional weighted inner product.

The POD basis of rank ``ell`` is built from the thin SVD of ``W^{1/2} Y``
and mapped back with ``W^{-1/2}`` so that ``Psi^H W Psi = I``.  Snapshot
weights in time are all one.
"""

from dataclasses import dataclass

import numpy as np

from . import numkit
from .errors import DataError, RankError, ShapeError

__all__ = [
    "SnapshotSet",
    "PodBasis",
    "compute_pod_basis",
    "energy_ratio",
    "choose_rank_by_energy",
    "project",
    "lift",
    "projection_error",
]


@dataclass(frozen=True)
class SnapshotSet:
    """Time-indexed snapshot matrix.

    Parameters
    ----------
    states : (n, m+1) ndarray
        Column ``j`` is the sample at ``times[j]``.
    times : (m+1,) ndarray
        Strictly increasing, uniformly spaced sample times.
    weights : None, (n,) ndarray or (n, n) ndarray
        Spatial weight matrix ``W`` (or its diagonal). ``None`` means identity.
    """

    states: np.ndarray
    times: np.ndarray
    weights: np.ndarray = None

    def __post_init__(self):
        states = numkit.as_matrix(self.states, "states")
        times = np.asarray(self.times, dtype=float).ravel()
        if states.shape[1] < 2:
            raise ShapeError("a snapshot set needs at least two columns")
        if times.size != states.shape[1]:
            raise ShapeError(
                f"{times.size} times given for {states.shape[1]} snapshot columns"
            )
        steps = np.diff(times)
        if np.any(steps <= 0):
            raise DataError("snapshot times must be strictly increasing")
        # roundoff in t_j grows with |t_j|, so measure spacing against it
        if np.max(np.abs(steps - steps[0])) > 1e-12 * max(np.abs(times).max(), steps[0]):
            raise DataError("snapshot times must be uniformly spaced")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "times", times)
        if self.weights is not None:
            object.__setattr__(
                self, "weights", _check_weights(self.weights, states.shape[0])
            )

    @property
    def dt(self):
        return float(self.times[1] - self.times[0])

    @property
    def n(self):
        return self.states.shape[0]

    @property
    def num_snapshots(self):
        return self.states.shape[1]

    @property
    def is_complex(self):
        return np.iscomplexobj(self.states)


def _check_weights(W, n):
    W = np.asarray(W, dtype=float)
    if W.ndim == 1:
        if W.size != n:
            raise ShapeError(f"weight diagonal has length {W.size}, expected {n}")
        if np.any(W <= 0):
            raise DataError("diagonal weights must be positive")
        return W
    if W.shape != (n, n):
        raise ShapeError(f"weight matrix has shape {W.shape}, expected ({n}, {n})")
    if not np.allclose(W, W.T):
        raise DataError("weight matrix must be symmetric")
    if np.linalg.eigvalsh(W)[0] <= 0:
        raise DataError("weight matrix must be positive definite")
    return W


def _weight_roots(W):
    """Return callables applying ``W^{1/2}`` and ``W^{-1/2}``."""
    if W is None:
        return (lambda X: X), (lambda X: X)
    if W.ndim == 1:
        r = np.sqrt(W)

        def scale(d):
            return lambda X: (d * X.T).T

        return scale(r), scale(1.0 / r)
    lam, Q = np.linalg.eigh(W)
    half = (Q * np.sqrt(lam)) @ Q.T
    inv_half = (Q / np.sqrt(lam)) @ Q.T
    return (lambda X: half @ X), (lambda X: inv_half @ X)


def _apply_weights(W, X):
    if W is None:
        return X
    if W.ndim == 1:
        return (W * X.T).T
    return W @ X


@dataclass(frozen=True)
class PodBasis:
    """Weight-orthonormal POD modes.

    ``modes`` is ``(n, rank)``; ``singular_values`` holds the whole nonzero
    spectrum ``sigma_1 >= ... >= sigma_d`` of ``W^{1/2} Y``.
    """

    modes: np.ndarray
    singular_values: np.ndarray
    weights: np.ndarray = None

    @property
    def rank(self):
        return self.modes.shape[1]

    @property
    def n(self):
        return self.modes.shape[0]

    @property
    def d(self):
        return self.singular_values.size

    def truncate(self, ell):
        if not 1 <= ell <= self.rank:
            raise RankError(f"cannot truncate rank {self.rank} basis to {ell}",
                            attainable=self.rank)
        return PodBasis(self.modes[:, :ell], self.singular_values, self.weights)


def _fix_signs(modes):
    """Make the largest-magnitude entry of every column positive real."""
    idx = np.argmax(np.abs(modes), axis=0)
    pivots = modes[idx, np.arange(modes.shape[1])]
    mag = np.abs(pivots)
    phase = np.where(mag == 0, 1.0, pivots / np.where(mag == 0, 1.0, mag))
    return modes / phase


def compute_pod_basis(snaps, rank, weights=None):
    """POD basis of the given rank.

    Parameters
    ----------
    snaps : SnapshotSet or (n, m) array_like
        Snapshots; a bare array uses ``weights`` (default identity).
    rank : int
        Number of modes, at most the numerical rank ``d`` of ``W^{1/2} Y``.
    """
    if isinstance(snaps, SnapshotSet):
        Y, W = snaps.states, snaps.weights
    else:
        Y = numkit.as_matrix(snaps, "snapshots")
        W = None if weights is None else _check_weights(weights, Y.shape[0])
    half, inv_half = _weight_roots(W)
    WY = half(Y)
    res = numkit.truncated_svd(WY, min(WY.shape))
    s = res.singular_values
    d = numkit.numerical_rank(s, WY.shape)
    if d == 0:
        raise DataError("snapshot matrix is numerically zero")
    if not 1 <= rank <= d:
        raise RankError(f"rank {rank} not attainable, numerical rank is {d}",
                        attainable=d)
    modes = _fix_signs(inv_half(res.left_vectors[:, :rank]))
    return PodBasis(modes, s[:d].copy(), W)


def energy_ratio(basis, ell):
    """Fraction of snapshot energy captured by the first ``ell`` modes."""
    if not 1 <= ell <= basis.d:
        raise RankError(f"ell={ell} outside [1, {basis.d}]", attainable=basis.d)
    s2 = basis.singular_values**2
    return float(np.sum(s2[:ell]) / np.sum(s2))


def choose_rank_by_energy(basis, threshold):
    """Smallest ``ell`` whose energy ratio reaches ``threshold``."""
    if not 0 < threshold <= 1:
        raise ValueError("threshold must lie in (0, 1]")
    s2 = basis.singular_values**2
    ratios = np.cumsum(s2) / np.sum(s2)
    # guard against cumsum roundoff leaving ratios[-1] just below 1
    ratios[-1] = 1.0
    return int(np.searchsorted(ratios, threshold) + 1)


def project(basis, y):
    """Reduced coordinates ``Psi^H W y``; works column-wise for 2D ``y``."""
    y = np.asarray(y)
    if y.shape[0] != basis.n:
        raise ShapeError(f"vector of length {y.shape[0]} for basis with n={basis.n}")
    return basis.modes.conj().T @ _apply_weights(basis.weights, y)


def lift(basis, y_reduced):
    """Full-space vector ``Psi y_reduced``."""
    y_reduced = np.asarray(y_reduced)
    if y_reduced.shape[0] != basis.rank:
        raise ShapeError(
            f"reduced vector of length {y_reduced.shape[0]} for rank {basis.rank}"
        )
    return basis.modes @ y_reduced


def projection_error(basis, Y):
    """Sum over columns of the squared W-norm of the projection residual."""
    Y = np.asarray(Y)
    R = Y - lift(basis, project(basis, Y))
    return float(np.real(np.sum(R.conj() * _apply_weights(basis.weights, R))))
