"""Exception and warning types raised across the package."""


class LieflowError(Exception):
    """Base class for computational errors (CLI exit code 1)."""


class GroupMismatch(LieflowError):
    pass


class OutOfChart(LieflowError):
    pass


class AtomAtIdentity(LieflowError):
    pass


class NonConstantCharacteristics(LieflowError):
    pass


class InfiniteJumpMass(LieflowError):
    pass


class NegativeTime(LieflowError):
    pass


class MissingWeight(LieflowError):
    pass


class SeparationViolated(LieflowError):
    pass


class InvalidTestFunction(LieflowError):
    pass


class ResolutionTooLow(UserWarning):
    """Quadrature resolution below the exactness rule for the requested cutoff."""
