"""Exception hierarchy shared by every crkit module."""


class CRKitError(Exception):
    """Base class for all toolkit errors."""


class DomainError(CRKitError, ValueError):
    """An input violates an operation's precondition."""


class SymmetryError(CRKitError, ValueError):
    """A tensor fails one of the symmetries its type requires."""


class InvariantViolation(CRKitError):
    """A computed result breaks a property that must always hold.

    Raised (or reported) when a sampled inequality has a counterexample,
    or when two independent evaluation routes disagree.
    """
