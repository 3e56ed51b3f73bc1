from __future__ import annotations


class SpinExtError(Exception):
    """Base domain error for user-facing failures."""

    pass


class DimensionMismatchError(SpinExtError):
    """Operands live in spaces of different dimension."""

    pass


class SingularMatrixError(SpinExtError):
    """Matrix has no inverse over the two-element field."""

    pass


class ZeroVectorError(SpinExtError):
    """A nonzero vector was required."""

    pass


class NotSymplecticError(SpinExtError):
    """Matrix does not preserve the standard symplectic pairing."""

    pass


class PreconditionError(SpinExtError):
    """Operation called outside its domain."""

    pass


class OutOfRangeError(PreconditionError):
    """Genus, dimension or index outside the configured range."""

    pass


class ArfMismatchError(PreconditionError):
    """Refinements with different Arf invariants cannot be related."""

    pass


class NotSemidirectError(PreconditionError):
    """Groups do not form the required semidirect decomposition."""

    pass


class BudgetExceededError(SpinExtError):
    """A state, group or enumeration budget was exhausted."""

    pass


class SearchExhaustedError(SpinExtError):
    """Witness search ran out of tries without a verified witness."""

    def __init__(self, message: str, *, tries: int, seed: int | None):
        super().__init__(message)
        self.tries = tries
        self.seed = seed


class InvariantViolationError(SpinExtError):
    """Internal defect: a mathematical invariant failed to hold."""

    pass


class ConfigurationError(SpinExtError):
    """Error in configuration files or environment overrides."""

    pass


class UsageError(SpinExtError):
    """Malformed command line or unparsable argument value."""

    pass


class MalformedInputError(UsageError):
    """Bit string, permutation or other literal could not be parsed."""

    pass
