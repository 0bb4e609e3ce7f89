"""Exception types shared across the package."""


class CopwinError(Exception):
    """Base class for all package errors."""


class BudgetExceeded(CopwinError):
    """A configured state or work budget would be exceeded.

    Raised up front, before any partial work is returned, so that an
    experiment never silently degrades to a truncated search.
    """


class Graph6Error(CopwinError, ValueError):
    """Malformed or unsupported graph6 input."""


class NoSafeMove(CopwinError):
    """A robber strategy found no legal move satisfying its rules."""


class PositionMismatch(CopwinError, ValueError):
    """A position does not belong to the solved game it was looked up in."""
