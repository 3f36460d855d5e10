"""Exception hierarchy shared by all poddmd modules."""


class PodDmdError(Exception):
    """Base class for every error raised by this package."""


class RankError(PodDmdError, ValueError):
    """A rank / truncation argument is outside the attainable range."""

    def __init__(self, message, attainable=None):
        super().__init__(message)
        self.attainable = attainable


class DataError(PodDmdError, ValueError):
    """Input data is non-finite or otherwise unusable (e.g. all zeros)."""


class ShapeError(PodDmdError, ValueError):
    """Array dimensions are inconsistent."""


class NumericalFailure(PodDmdError, ArithmeticError):
    """A dense factorization did not converge."""

    def __init__(self, message, info=None):
        super().__init__(message)
        self.info = info


class SingularMatrixError(PodDmdError, ArithmeticError):
    """A linear system is numerically singular."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class DegenerateBasisError(PodDmdError, ArithmeticError):
    """A basis or interpolation system lost rank."""


class DivergenceError(PodDmdError, ArithmeticError):
    """Time integration produced non-finite values."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class StateError(PodDmdError, RuntimeError):
    """An object was used before a required fitting step."""
