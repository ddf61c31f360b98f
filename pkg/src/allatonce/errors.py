"""Exception types raised across the package."""


class AllAtOnceError(Exception):
    """Base class for errors raised by :mod:`allatonce`."""


class DimensionError(AllAtOnceError, ValueError):
    """Array sizes do not match the declared block layout."""


class ParameterError(AllAtOnceError, ValueError):
    """An input parameter is outside its admissible range."""


class SizeGuardError(AllAtOnceError, ValueError):
    """A dense computation was requested above the allowed size."""


class SingularSymbolError(AllAtOnceError, ArithmeticError):
    """The symbol modulus vanishes on a diagonalizing mode."""


class StateError(AllAtOnceError, RuntimeError):
    """An object was used before being built or with mismatched sizes."""


class DivergenceError(AllAtOnceError, ArithmeticError):
    """An iterative solver produced non-finite values."""
