"""Exception types shared across the package."""


class FusionLimError(Exception):
    """Base class for all package errors."""


class InputError(FusionLimError, ValueError):
    """Malformed user input (files, permutations, specs)."""


class InvalidPermutation(InputError):
    pass


class OrderBoundExceeded(FusionLimError):
    pass


class NotPSubgroup(InputError):
    pass


class NotSylow(InputError):
    pass


class MismatchedAmbientGroup(InputError):
    pass


class FamilyNotOverconjugationClosed(InputError):
    pass


class FamilyNotConjugationClosed(InputError):
    pass


class NotASubcategory(InputError):
    pass


class NotFunctorial(InputError):
    pass


class WrongCategory(InputError):
    pass


class SinkObjectMissing(InputError):
    pass


class NotCentric(InputError):
    pass


class DegreeTooLarge(FusionLimError):
    pass


class GroupTooLarge(FusionLimError):
    pass


class DimensionBlowup(FusionLimError):
    """A resolution or matrix exceeded the configured dimension cap."""


class HypothesisFailed(FusionLimError):
    pass
