"""Exception hierarchy shared by all modules.

Two roots matter to the CLI: ``ConfigInvalid`` maps to exit code 2 and
every ``NumericalFailure`` subclass maps to exit code 3.
"""


class NumericalFailure(ValueError):
    """Base class for input or numerical failures inside the library."""


class ConfigInvalid(ValueError):
    """Experiment configuration failed schema validation."""


# spinor_core
class NotNull(NumericalFailure):
    pass


class PastPointing(NumericalFailure):
    pass


class ZeroVector(NumericalFailure):
    pass


class InvalidFrame(NumericalFailure):
    pass


class NotUnimodular(NumericalFailure):
    pass


# massive_rep
class ZeroSpinor(NumericalFailure):
    pass


class BadNormalization(NumericalFailure):
    pass


class NegativeRadicand(NumericalFailure):
    pass


class MasslessUnsupported(NumericalFailure):
    pass


class GaugeUndefined(NumericalFailure):
    pass


class NotNormalized(NumericalFailure):
    pass


class OffShell(NumericalFailure):
    pass


# photon_rep
class NonTimelikeR(NumericalFailure):
    pass


class GridNotClosed(NumericalFailure):
    pass


class ZeroKernel(NumericalFailure):
    pass


class HomogeneityViolated(NumericalFailure):
    pass


# epr_engine / fock_oracle
class ZeroDenominator(NumericalFailure):
    pass


class ZeroNorm(NumericalFailure):
    pass


class DimensionOverflow(NumericalFailure):
    pass


class TruncationTooLow(NumericalFailure):
    pass


# delta_m
class NonpositiveDensity(NumericalFailure):
    pass
