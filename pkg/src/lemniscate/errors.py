"""Exception hierarchy shared by the library and the CLI."""


class LemniscateError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(LemniscateError, ValueError):
    """Bad call shape: empty inputs, counts out of range, unknown options."""


class ParameterError(LemniscateError, ValueError):
    """A numeric parameter falls outside the range an operation accepts."""


class DomainError(LemniscateError, ValueError):
    """A point lies where a map is undefined (e.g. the pole of the Joukowski map)."""


class DegenerateInputError(LemniscateError, ValueError):
    """Coincident points where distinct ones are required."""


class InfeasibleGeometryError(LemniscateError):
    """The requested strip family does not fit inside the domain."""


class ResolutionError(LemniscateError):
    """A raster would exceed the memory guard."""


class NonConvergenceError(LemniscateError):
    """The degree schedule ran out before the lemniscate verified.

    ``report`` carries the diagnostics of every attempt; ``polynomial`` is the
    monicized polynomial of the last attempt (if one was built).
    """

    def __init__(self, message, report=None, polynomial=None):
        super().__init__(message)
        self.report = report
        self.polynomial = polynomial
