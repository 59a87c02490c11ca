"""Exception types shared across the package."""


class ShapeError(ValueError):
    """Invalid partition or interlacing coordinates."""


class NumericalError(RuntimeError):
    """Base class for numerical failures (root finding, quadrature, consistency checks)."""


class RootFindingError(NumericalError):
    pass


class LocalizationError(NumericalError):
    """Computed roots contradict the interval localization of the critical equation."""


class QuadratureError(NumericalError):
    pass


class FrozenPointError(ValueError):
    """An operation that needs a liquid point was given a frozen one."""
