"""Exception types shared across the package."""


class UsageError(ValueError):
    """Bad arguments or malformed input."""


class DomainError(ValueError):
    """A mathematically invalid request, e.g. inverting zero."""


class UnsupportedParameters(UsageError):
    """Parameters outside what a given construction or search supports."""


class ConstructionFailed(RuntimeError):
    """Random coefficient draws kept failing verification."""


class IntegrityError(RuntimeError):
    """A scheme object disagrees with itself."""


class ContractViolation(ValueError):
    """Input to a transform does not meet its precondition."""
