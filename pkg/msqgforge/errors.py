# errors.py


class ForgeError(Exception):
    """Base class for every error raised by msqgforge."""


class ConfigError(ForgeError, ValueError):
    """Run configuration or schedule input is invalid."""


class NonPositiveBase(ConfigError):
    """Schedule base a or exponent base b is below 2."""


class ZeroStages(ConfigError):
    """Schedule asked for fewer than one stage."""


class GeometryUnavailable(ForgeError, RuntimeError):
    """A direction system was required but has not been built."""


class SingularSystem(ForgeError, ArithmeticError):
    """The rank-one tensors of a direction set are linearly dependent."""


class OutsideBall(ForgeError, ValueError):
    """A matrix lies outside the ball on which the coefficient maps are positive."""


class NegativePowerOnMean(ForgeError, ValueError):
    """A negative fractional power was applied to a field with nonzero mean."""


class BandExceedsGrid(ForgeError, ValueError):
    """A frequency band does not fit inside the dealiased grid."""


class NotSolenoidal(ForgeError, ValueError):
    """A field expected to be divergence-free is not."""


class InsufficientHistory(ForgeError, ValueError):
    """A time series does not reach far enough into the past."""


class CFLViolation(ForgeError, RuntimeError):
    """A characteristic step moves further than one grid cell."""


class MissingTimeHalo(ForgeError, ValueError):
    """A time-derivative stencil needs samples outside the series."""


class NumericalFault(ForgeError, FloatingPointError):
    """NaN or infinite values were produced."""


class StrictModeFailure(ForgeError):
    """An invariant failed while running in strict mode."""


class CheckpointError(ForgeError, IOError):
    """A checkpoint file is malformed."""


__all__ = [
    "ForgeError",
    "ConfigError",
    "NonPositiveBase",
    "ZeroStages",
    "GeometryUnavailable",
    "SingularSystem",
    "OutsideBall",
    "NegativePowerOnMean",
    "BandExceedsGrid",
    "NotSolenoidal",
    "InsufficientHistory",
    "CFLViolation",
    "MissingTimeHalo",
    "NumericalFault",
    "StrictModeFailure",
    "CheckpointError",
]
