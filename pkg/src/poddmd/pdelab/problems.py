"""Finite-difference test problems of the form ``M y' = A y + f(t, y)``.

Boundary conditions are homogeneous Dirichlet, encoded by keeping interior
unknowns only.  Every problem is integrated by semi-implicit Euler::

    (M - dt A) y[n+1] = M y[n] + dt f(t[n], y[n])
"""

import time
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..errors import DivergenceError
from ..pod import SnapshotSet

__all__ = [
    "StencilNonlinearity",
    "FdProblem",
    "FullSolution",
    "build_advection1d",
    "build_parabolic2d",
    "build_burgers1d",
    "build_nls1d",
    "integrate_full",
    "PRESETS",
    "build_preset",
]


class StencilNonlinearity:
    """Nonlinearity whose component ``i`` depends on ``y[i + offsets]``.

    ``local(t, vals)`` receives ``vals`` with one leading row per offset
    (out-of-range neighbours are zero, i.e. the Dirichlet data) and returns
    the components.  The same kernel drives full and sampled evaluation, so
    sampling is exact by construction.
    """

    def __init__(self, n, offsets, local, zero=False):
        self.n = int(n)
        self.offsets = tuple(int(o) for o in offsets)
        self.local = local
        self.zero = zero

    def _neighbours(self, y):
        pad = max(abs(o) for o in self.offsets)
        yp = np.concatenate([np.zeros(pad, y.dtype), y, np.zeros(pad, y.dtype)])
        return np.stack([yp[pad + o: pad + o + self.n] for o in self.offsets])

    def __call__(self, t, y):
        if self.zero:
            return np.zeros_like(y)
        return self.local(t, self._neighbours(y))

    def stencil(self, i):
        """Rows needed to evaluate component ``i``."""
        return [i + o for o in self.offsets if 0 <= i + o < self.n]

    def sampling_plan(self, indices):
        """Rows to gather and the position map for :meth:`evaluate_sampled`.

        Returns ``rows`` (sorted distinct row indices) and ``pos`` of shape
        ``(len(offsets), k)`` indexing into ``rows`` extended by a trailing
        zero slot for out-of-range neighbours.
        """
        indices = np.asarray(indices, dtype=int)
        rows = sorted({r for i in indices for r in self.stencil(int(i))})
        where = {r: j for j, r in enumerate(rows)}
        zero_slot = len(rows)
        pos = np.array(
            [[where.get(int(i) + o, zero_slot) for i in indices] for o in self.offsets],
            dtype=int,
        )
        return np.array(rows, dtype=int), pos

    def evaluate_sampled(self, t, gathered, pos):
        """Components at the planned indices from values at the planned rows."""
        ext = np.concatenate([gathered, np.zeros(1, gathered.dtype)])
        if self.zero:
            return np.zeros(pos.shape[1], gathered.dtype)
        return self.local(t, ext[pos])


@dataclass
class FdProblem:
    name: str
    linear: sp.spmatrix
    nonlinearity: StencilNonlinearity
    y0: np.ndarray
    t_final: float
    dt: float
    grid: dict
    mass: sp.spmatrix = None
    params: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.y0.size

    @property
    def is_complex(self):
        return np.iscomplexobj(self.y0) or np.iscomplexobj(self.linear.data)

    @property
    def steps(self):
        return int(round(self.t_final / self.dt))

    @property
    def times(self):
        return self.dt * np.arange(self.steps + 1)

    @property
    def mass_matrix(self):
        return sp.identity(self.n, format="csr") if self.mass is None else self.mass


class FullSolution(NamedTuple):
    states: SnapshotSet
    nonlinearity: SnapshotSet
    seconds: float


def _second_difference(n, h):
    return sp.diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(n, n), format="csr") / h**2


def build_advection1d(a=0.0, b=4.0, t_final=3.0, theta=1.0, dx=0.01, dt=0.01):
    """Linear advection ``y_t + theta y_x = 0`` with first-order upwinding."""
    n = int(round((b - a) / dx)) - 1
    x = a + dx * np.arange(1, n + 1)
    if theta >= 0:
        D = sp.diags([1.0, -1.0], [0, -1], shape=(n, n), format="csr") / dx
    else:
        D = sp.diags([-1.0, 1.0], [0, 1], shape=(n, n), format="csr") / dx
    y0 = np.where((x >= 0) & (x <= 1), np.sin(np.pi * x), 0.0)
    f = StencilNonlinearity(n, (0,), lambda t, v: np.zeros_like(v[0]), zero=True)
    return FdProblem(
        "advection", (-theta * D).tocsr(), f, y0, t_final, dt, {"x": x},
        params=dict(a=a, b=b, theta=theta, dx=dx),
    )


def build_parabolic2d(theta=0.01, mu=-10.0, nx=50, t_final=3.0, num_snapshots=100):
    """Semi-linear heat equation ``y_t - theta Lap y + mu (y - y^3) = 0`` on
    the unit square; unknowns ordered with ``x1`` running fastest.

    With ``mu < 0`` the reaction drives the interior to the state ``y = 1``.
    """
    if theta <= 0:
        raise ValueError("theta must be positive")
    h = 1.0 / (nx + 1)
    x = h * np.arange(1, nx + 1)
    L = _second_difference(nx, h)
    I = sp.identity(nx, format="csr")
    A = theta * (sp.kron(I, L) + sp.kron(L, I))
    X1, X2 = np.meshgrid(x, x)  # X1 varies along columns -> fastest after ravel
    prod = (X1 * X2).ravel()
    y0 = np.where((prod >= 0.1) & (prod <= 0.6), 0.1, 0.0)
    f = StencilNonlinearity(nx * nx, (0,), lambda t, v: -mu * (v[0] - v[0] ** 3))
    dt = t_final / (num_snapshots - 1)
    return FdProblem(
        "parabolic2d", A.tocsr(), f, y0, t_final, dt,
        {"x1": X1.ravel(), "x2": X2.ravel(), "nx": nx},
        params=dict(theta=theta, mu=mu, nx=nx),
    )


def build_burgers1d(theta=0.01, n=199, t_final=1.0, dt=0.01, initial="sgn"):
    """Viscous Burgers ``y_t - theta y_xx + y y_x = 0`` on ``[0, 1]``.

    ``initial="sgn"`` is ``sgn(x)``, i.e. one in the interior;
    ``initial="sine"`` uses ``sin(2 pi x)``.
    """
    h = 1.0 / (n + 1)
    x = h * np.arange(1, n + 1)
    if initial == "sgn":
        y0 = np.sign(x)
    elif initial == "sine":
        y0 = np.sin(2 * np.pi * x)
    else:
        raise ValueError(f"unknown initial condition {initial!r}")

    def local(t, v):
        left, mid, right = v
        return -mid * (right - left) / (2 * h)

    f = StencilNonlinearity(n, (-1, 0, 1), local)
    name = "burgers" if initial == "sgn" else "burgers-sine"
    return FdProblem(
        name, (theta * _second_difference(n, h)).tocsr(), f, y0, t_final, dt,
        {"x": x}, params=dict(theta=theta, n=n, initial=initial),
    )


def build_nls1d(half_width=15.0, theta=1.0, n=299, t_final=2.0, dt=0.01):
    """Cubic Schroedinger ``y_t - i theta y_xx - i |y|^2 y = 0`` on
    ``[-L, L]`` with ``y0 = sech(x)``."""
    h = 2 * half_width / (n + 1)
    x = -half_width + h * np.arange(1, n + 1)
    A = (1j * theta * _second_difference(n, h)).tocsr()
    y0 = (1.0 / np.cosh(x)).astype(complex)
    f = StencilNonlinearity(n, (0,), lambda t, v: 1j * np.abs(v[0]) ** 2 * v[0])
    return FdProblem(
        "nls", A, f, y0, t_final, dt, {"x": x},
        params=dict(half_width=half_width, theta=theta, n=n),
    )


PRESETS = {
    "advection": build_advection1d,
    "parabolic2d": build_parabolic2d,
    "burgers": build_burgers1d,
    "burgers-sine": lambda **kw: build_burgers1d(**{"initial": "sine", **kw}),
    "nls": build_nls1d,
}


def build_preset(name, **overrides):
    try:
        builder = PRESETS[name]
    except KeyError:
        raise ValueError(
            f"unknown problem {name!r}; choose from {sorted(PRESETS)}"
        ) from None
    return builder(**overrides)


def integrate_full(p: FdProblem) -> FullSolution:
    """Semi-implicit Euler in the full space.

    Returns state and nonlinearity snapshots on ``p.times`` and the wall time
    of the stepping loop.
    """
    M = p.mass_matrix.tocsc()
    dtype = complex if p.is_complex else float
    lu = spla.splu((M - p.dt * p.linear).tocsc().astype(dtype))
    times = p.times
    Y = np.empty((p.n, times.size), dtype=dtype)
    F = np.empty_like(Y)
    y = p.y0.astype(dtype)
    start = time.perf_counter()
    for j, t in enumerate(times):
        Y[:, j] = y
        F[:, j] = p.nonlinearity(t, y)
        if j == times.size - 1:
            break
        y = lu.solve(M @ y + p.dt * F[:, j])
        if not np.all(np.isfinite(y)):
            raise DivergenceError(f"{p.name}: non-finite state at step {j + 1}", step=j + 1)
    seconds = time.perf_counter() - start
    return FullSolution(SnapshotSet(Y, times), SnapshotSet(F, times), seconds)
