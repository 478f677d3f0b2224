"""Exception hierarchy shared by the numerical modules and the CLI."""


class AxbError(Exception):
    """Base class for every error raised by axbwave."""


class ConfigError(AxbError, ValueError):
    """Invalid sweep configuration (CLI exit code 2)."""


class DomainError(AxbError, ValueError):
    """A numerical operation was called outside its domain (CLI exit code 2)."""


class NumericalError(AxbError, ArithmeticError):
    """A computation failed to reach its accuracy target (CLI exit code 3)."""


class QuadratureError(NumericalError):
    """Adaptive quadrature did not converge within max_subdivisions."""


class DecayHintError(NumericalError):
    """Tail contributions contradict the decay rate supplied by the caller."""


class ArcchDomainError(NumericalError):
    """arcch argument lies below 1 by more than the clamp tolerance."""
