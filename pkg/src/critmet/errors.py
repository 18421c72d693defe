"""Exception hierarchy shared by all modules."""


class CritmetError(Exception):
    """Base class for every error raised by the package."""


class ValidationError(CritmetError, ValueError):
    """Malformed input: wrong shape, non-symmetric matrix, bad label set."""


class DomainError(CritmetError, ValueError):
    """Input outside the region where a formula is defined (pole, threshold, zero variance)."""


class NumericalError(CritmetError, ArithmeticError):
    """An iterative kernel failed to converge or a consistency check tripped."""


class ConfigurationError(CritmetError, ValueError):
    """Solver settings that cannot give a trustworthy answer (step too large, etc.)."""
