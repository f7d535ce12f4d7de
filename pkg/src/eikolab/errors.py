"""Exception types shared across the library."""


class EikolabError(Exception):
    """Base class for library errors."""


class ConfigurationError(EikolabError):
    """Invalid grid, generator or scenario configuration."""


class ResolutionError(EikolabError):
    """An operation was requested below its resolvable scale (e.g. eps < 2h)."""


class DomainError(EikolabError):
    """A region/support requirement is violated (empty region, support leak)."""


class PreconditionError(EikolabError):
    """An operation's mathematical precondition fails on the given input."""


class SingularityError(EikolabError):
    """Evaluation at a point where a formula is singular (coordinate axes)."""


class HypothesisError(EikolabError):
    """A hypothesis of the underlying statement is violated (axis-aligned xi)."""
