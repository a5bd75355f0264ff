"""Exception types shared across the solver suite."""


class InterdictError(Exception):
    """Base class for all package errors."""


class CyclicGraphError(InterdictError):
    """Raised by operations that require an acyclic graph."""


class TooLargeError(InterdictError):
    """Raised when an enumeration would exceed its safety guard."""


class InfeasibleError(InterdictError):
    """Raised when generator constraints cannot be satisfied."""


class NotATreeError(InterdictError):
    """Raised when a tree-only routine receives a non-tree graph."""


class PreprocessError(InterdictError):
    """Raised when preprocessing leaves no playable instance."""
