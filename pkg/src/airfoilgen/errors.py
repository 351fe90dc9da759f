"""Exception hierarchy shared across the package."""


class AirfoilGenError(Exception):
    """Base class for all errors raised by this package."""


# geometry
class MalformedFile(AirfoilGenError):
    pass


class AmbiguousFormat(AirfoilGenError):
    pass


class InvalidCount(AirfoilGenError):
    pass


class DegenerateSurface(AirfoilGenError):
    pass


class EmptyDataset(AirfoilGenError):
    pass


class AllZero(AirfoilGenError):
    pass


class BadWindow(AirfoilGenError):
    pass


# neuralnet / vaegan
class ShapeMismatch(AirfoilGenError):
    pass


class StaleCache(AirfoilGenError):
    pass


class NonFiniteLoss(AirfoilGenError):
    pass


class OutOfRangeProbability(AirfoilGenError):
    pass


class IoFailure(AirfoilGenError):
    pass


class VersionMismatch(AirfoilGenError):
    pass


class CorruptChecksum(AirfoilGenError):
    pass


# latent
class NotAffine(AirfoilGenError):
    pass


class TooFewPoints(AirfoilGenError):
    pass


class InsufficientData(AirfoilGenError):
    pass


class TooFewSamples(AirfoilGenError):
    pass


class NonFiniteResult(AirfoilGenError):
    pass


# aero
class ExecutableMissing(AirfoilGenError):
    pass


class EvalTimeout(AirfoilGenError):
    pass


class ParseFailure(AirfoilGenError):
    pass


class DegenerateGeometry(AirfoilGenError):
    pass


class NonPositiveTarget(AirfoilGenError):
    pass


# gaopt
class DimensionMismatch(AirfoilGenError):
    pass


class Unevaluated(AirfoilGenError):
    pass


class ConfigInvalid(AirfoilGenError):
    pass


class EvaluatorFailure(AirfoilGenError):
    pass


# cli
class NoFilesFound(AirfoilGenError):
    pass


class UnknownAirfoil(AirfoilGenError):
    pass


class BadCoefficients(AirfoilGenError):
    pass
