"""Exception hierarchy shared by the library and the CLI."""


class InfmodError(Exception):
    """Base class for all errors raised by this package."""


class UnknownPointError(InfmodError, KeyError):
    """A point identifier does not belong to the space."""

    def __str__(self):
        return Exception.__str__(self)


class InvalidSpaceError(InfmodError, ValueError):
    pass


class InvalidCurveError(InfmodError, ValueError):
    pass


class NonRectifiableError(InfmodError):
    """Dyadic refinement hit the segment cap before the length estimate settled.

    ``lower_bound`` is the best partition sum reached; the true length is at
    least this large.
    """

    def __init__(self, message, lower_bound, segments):
        super().__init__(message)
        self.lower_bound = lower_bound
        self.segments = segments


class ConsistencyError(InfmodError):
    """Two independent routes to the same quantity disagree."""


class SchemaError(InfmodError, ValueError):
    """Input file does not match the expected schema."""

    def __init__(self, location, message):
        super().__init__(f"{location}: {message}")
        self.location = location
