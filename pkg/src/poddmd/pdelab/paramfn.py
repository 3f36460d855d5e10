"""Interpolation of the parametrized function ``s(x; mu)`` by DMD and DEIM.

DMD treats the parameter axis as pseudo-time with step ``dmu``; DEIM
interpolates from the function evaluated at a few selected grid points.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from ..deim import build_deim_operator, deim_apply, select_indices_lu
from ..dmd import dmd_evaluate, exact_dmd, fit_amplitudes
from ..pod import compute_pod_basis

__all__ = [
    "ParamFunctionSet",
    "param_function",
    "build_param_function",
    "interpolate_param_dmd",
    "interpolate_param_deim",
]


def param_function(x, mu):
    return (1 - x) * np.cos(3 * np.pi * mu * (x + 1)) * np.exp(-(1 + x) * mu)


@dataclass(frozen=True)
class ParamFunctionSet:
    grid: np.ndarray
    parameters: np.ndarray
    values: np.ndarray
    func: object = param_function

    @property
    def dmu(self):
        return float(self.parameters[1] - self.parameters[0])


def build_param_function(n=101, s=51, mu_range=(1.0, np.pi)):
    x = np.linspace(-1.0, 1.0, n)
    mus = np.linspace(mu_range[0], mu_range[1], s)
    return ParamFunctionSet(x, mus, param_function(x[:, None], mus[None, :]))


def _check_mu(pset, mu):
    lo, hi = pset.parameters[0], pset.parameters[-1]
    if not lo <= mu <= hi:
        warnings.warn(f"mu={mu} outside [{lo}, {hi}]: extrapolating", stacklevel=3)


def interpolate_param_dmd(pset, mu, rank):
    """DMD along the parameter axis, evaluated at ``mu``."""
    _check_mu(pset, mu)
    F = pset.values
    model = exact_dmd(F[:, :-1], F[:, 1:], pset.dmu, rank)
    model = fit_amplitudes(model, F[:, 0], pset.parameters[0])
    return dmd_evaluate(model, mu).real


def interpolate_param_deim(pset, mu, rank):
    """DEIM reconstruction from ``s`` sampled at ``rank`` selected points."""
    _check_mu(pset, mu)
    U = compute_pod_basis(pset.values, rank).modes
    op = build_deim_operator(U, select_indices_lu(U))
    samples = pset.func(pset.grid[op.indices], mu)
    return deim_apply(op, samples)
