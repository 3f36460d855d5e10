"""Finite-difference test problems and the parametrized-function set."""

from .paramfn import (
    ParamFunctionSet,
    build_param_function,
    interpolate_param_deim,
    interpolate_param_dmd,
    param_function,
)
from .problems import (
    PRESETS,
    FdProblem,
    FullSolution,
    StencilNonlinearity,
    build_advection1d,
    build_burgers1d,
    build_nls1d,
    build_parabolic2d,
    build_preset,
    integrate_full,
)

__all__ = [
    "ParamFunctionSet",
    "build_param_function",
    "interpolate_param_deim",
    "interpolate_param_dmd",
    "param_function",
    "PRESETS",
    "FdProblem",
    "FullSolution",
    "StencilNonlinearity",
    "build_advection1d",
    "build_burgers1d",
    "build_nls1d",
    "build_parabolic2d",
    "build_preset",
    "integrate_full",
]
