"""Exception hierarchy.

Every error carries a stable ``name`` (the class name) that the command line
reports, and an ``exit_code``: 2 for invalid input, 3 for numerical failure.
"""


class MslabError(Exception):
    exit_code = 3

    @property
    def name(self):
        return type(self).__name__


class InputError(MslabError, ValueError):
    """The caller handed us something outside an operation's preconditions."""

    exit_code = 2


class NumericalError(MslabError, ArithmeticError):
    """A computation did not reach its accuracy contract."""

    exit_code = 3


# rational_core
class ZeroPolynomial(InputError):
    pass


class PoleOnCircle(InputError):
    pass


class PoleAtOrigin(InputError):
    pass


class PoleInDisk(InputError):
    pass


class QuadratureDivergence(NumericalError):
    pass


class PoleInDiskWarning(UserWarning):
    """A Taylor expansion was requested for a function with a pole in the disk."""


# blaschke
class NearPole(InputError):
    pass


class VNotInDisk(InputError):
    pass


class InvalidBlaschke(InputError):
    pass


# model_space
class LambdaNotInDisk(InputError):
    pass


class MultiplicityPreconditionFailed(InputError):
    pass


class NotInModelSpace(InputError):
    pass


# nearly_invariant
class SingularGram(InputError):
    pass


class AllVanishAtOrigin(InputError):
    pass


class ThetaNotVanishingAtZero(InputError):
    pass


class NotIsometric(InputError):
    pass


class NotNormalized(InputError):
    pass


class NotPositiveAtOrigin(InputError):
    pass


class ClarkBoundary(InputError):
    pass


# operators
class DimensionMismatch(InputError):
    pass


class WZero(InputError):
    pass


# spectral
class NotAnEigenvalue(InputError):
    pass


class MultiplicityTooLow(InputError):
    pass


class SpectralMismatch(NumericalError):
    pass


class VerificationFailed(NumericalError):
    pass


# crofoot_lattice
class GNotInModelSpace(NotInModelSpace):
    pass


class GVanishesOnCircle(InputError):
    pass


class PhiNotVanishingAtZero(InputError):
    pass


# cli
class UnknownExample(InputError):
    pass


class GridTooLarge(InputError):
    pass


class ConfigError(InputError):
    pass
