"""Exception types shared across the package."""


class NoetherELError(Exception):
    """Base class for all package-specific failures."""


class ParseError(NoetherELError):
    """Raised when polynomial or JSON input text cannot be interpreted."""


class CapExceeded(NoetherELError):
    """A configured resource cap was hit before the computation finished."""


class FactorizationLimit(CapExceeded):
    """Trial division ran out of room while factoring an integer."""


class InexactDivision(NoetherELError):
    """Exact polynomial division was requested but the divisor does not divide."""


class NotInvertible(NoetherELError):
    """A ring element or matrix has no inverse in the given context."""


class ValidationError(NoetherELError):
    """A domain precondition failed (bad unit order, level mismatch, ...)."""
