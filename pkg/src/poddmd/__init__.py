"""Reduced-order models of nonlinear systems: POD-Galerkin with the
nonlinear term handled by full evaluation, DEIM or DMD regression."""

from . import deim, dmd, numkit, pod, rom
from .errors import (
    DataError,
    DegenerateBasisError,
    DivergenceError,
    NumericalFailure,
    PodDmdError,
    RankError,
    ShapeError,
    SingularMatrixError,
    StateError,
)

__version__ = "0.1.0"
