"""Exception hierarchy shared by all modules."""


class CBSError(Exception):
    """Base class for every error raised by the package."""


class NotHermitianError(CBSError, ValueError):
    pass


class NotNormalizedError(CBSError, ValueError):
    pass


class DegenerateAxisError(CBSError, ValueError):
    pass


class OutOfRangeError(CBSError, ValueError):
    pass


class WrongPropagationError(CBSError, ValueError):
    pass


class NegativeWeightError(CBSError, ArithmeticError):
    pass


class ZeroWeightError(CBSError, ArithmeticError):
    """The conditional ensemble is empty: no double-scattering events survive."""


class NotSymmetricStateError(CBSError, ValueError):
    pass


class ResidualTooLargeError(CBSError, ArithmeticError):
    pass


class BadResolutionError(CBSError, ValueError):
    pass


class AllDarkError(ZeroWeightError):
    """Every quadrature node is a dark direction."""
