"""Exception hierarchy shared across the package."""


class SpredError(Exception):
    """Base class for all package errors."""


class InputError(SpredError, ValueError):
    """Malformed or inconsistent input data."""


class DimensionMismatch(InputError):
    pass


class ConfigError(SpredError, ValueError):
    """Invalid algorithm configuration."""


class NumericalError(SpredError, ArithmeticError):
    """A numerical routine could not produce a valid result."""


class DegenerateQRError(NumericalError):
    pass


class CutLocusError(NumericalError):
    """The Grassmann logarithm is undefined (a principal angle equals pi/2)."""


class WellDefinednessError(SpredError, ValueError):
    """The projection does not induce a simplicial map at the requested shift."""

    def __init__(self, message, simplex=None, parameter=None):
        super().__init__(message)
        self.simplex = simplex
        self.parameter = parameter
