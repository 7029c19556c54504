"""Exception types shared across the package."""


class LcsfidError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(LcsfidError, ValueError):
    """A physical parameter or argument is out of its valid domain."""


class OverlapError(LcsfidError):
    """An excitation pulse fired while the emitter was still excited."""


class ImpossibleOutcomeError(LcsfidError):
    """A projective measurement was requested on an outcome of (near-)zero probability."""


class ConvergenceError(LcsfidError):
    """Adaptive quadrature failed to converge below the requested tolerance.

    Carries the last two iterates so callers can inspect how far apart they were.
    """

    def __init__(self, message, last_two=None):
        super().__init__(message)
        self.last_two = last_two


class ConfigError(LcsfidError):
    """A scenario file is malformed or violates the schema."""
