"""Exception hierarchy shared by all modules."""


class BitensionError(Exception):
    """Base class for every error raised by this package."""


class PointOutsideChart(BitensionError):
    pass


class SingularMetric(BitensionError):
    pass


class UnknownChart(BitensionError):
    pass


class BadParams(BitensionError):
    pass


class PoleSingular(BitensionError):
    pass


class NodeOutsideInterior(BitensionError):
    pass


class NotOnSphere(BitensionError):
    pass


class EmptyInterior(BitensionError):
    pass


class LatticeMismatch(BitensionError):
    pass


class EmptyMask(BitensionError):
    pass


class BadOrder(BitensionError):
    pass


class PropertyViolated(BitensionError):
    pass


class BadDimension(BitensionError):
    pass


class SliceOutsideChart(BitensionError):
    pass


class ChartEscape(BitensionError):
    pass


class StepDiverged(BitensionError):
    """Raised when the flow cannot decrease the bienergy.

    ``state`` carries the partial flow state (with its history) at the
    moment of failure, when one is available.
    """

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class SupportTooLarge(BitensionError):
    pass


class BaseNotBiharmonic(BitensionError):
    pass


class ConfigInvalid(BitensionError):
    pass
