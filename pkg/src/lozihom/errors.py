"""Exception hierarchy shared by all modules."""


class LoziError(Exception):
    """Base class for every error raised by the package."""


class DomainError(LoziError, ValueError):
    """Input outside the domain of an operation (non-finite value, bad radicand, ...)."""


class DegenerateParameterError(DomainError):
    """Parameters outside the main region or on a degenerate edge."""


class SingularMapError(LoziError):
    """The inverse map was requested with b = 0."""


class DivergenceError(LoziError):
    """Iteration left the finite floating point range."""

    def __init__(self, message, last_index):
        super().__init__(message)
        self.last_index = last_index


class TruncationError(LoziError):
    """A manifold construction hit its vertex budget."""

    def __init__(self, message, completed_depth):
        super().__init__(message)
        self.completed_depth = completed_depth


class ExhaustionError(LoziError):
    """A bounded search ran out of iterations."""


class BoundaryAmbiguityError(LoziError):
    """Classification requested too close to the terminus of a truncated arc."""


class InsufficientDepthError(LoziError):
    """A condition references anchors the constructed arcs do not realize."""


class NotFoundError(LoziError):
    """A root or bracket could not be found in the given search box."""
