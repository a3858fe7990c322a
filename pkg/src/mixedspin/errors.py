"""Exception hierarchy shared by every module of the package."""


class MixedSpinError(Exception):
    """Base class for all errors raised by :mod:`mixedspin`."""


class NotHermitian(MixedSpinError, ValueError):
    pass


class NoConvergence(MixedSpinError, ArithmeticError):
    pass


class BadShape(MixedSpinError, ValueError):
    pass


class NotDensityMatrix(MixedSpinError, ValueError):
    pass


class DegenerateCoupling(MixedSpinError, ValueError):
    """Raised by closed-form routines that divide by the coupling J."""


class NonPositiveTemperature(MixedSpinError, ValueError):
    pass


class NegativeField(MixedSpinError, ValueError):
    pass


class CrossCheckError(MixedSpinError, ArithmeticError):
    """Closed-form and numeric paths disagree beyond tolerance."""


class InvalidSpec(MixedSpinError, ValueError):
    """A sweep specification is malformed; ``field`` names the culprit."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class InvalidBracket(MixedSpinError, ValueError):
    pass


class NonFiniteResult(MixedSpinError, ArithmeticError):
    pass
