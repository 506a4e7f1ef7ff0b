"""Exception hierarchy shared by the arithmetic layers and the CLI."""


class PhiGammaError(Exception):
    """Base class for every error raised by this package."""


class FieldError(PhiGammaError, ValueError):
    pass


class DenominatorDivisibleByP(PhiGammaError, ValueError):
    pass


class InsufficientPadicPrecision(PhiGammaError, ArithmeticError):
    pass


class ZeroArgument(PhiGammaError, ValueError):
    pass


class NotOneUnit(PhiGammaError, ValueError):
    """A series that must be congruent to 1 mod X is not."""


class PoleTooDeep(PhiGammaError, ValueError):
    pass


class NoSolutionAtPrecision(PhiGammaError, ArithmeticError):
    pass


class NonPrimitiveExponent(PhiGammaError, ValueError):
    pass


class ExponentOutOfRange(PhiGammaError, ValueError):
    pass


class ParameterOutOfRange(PhiGammaError, ValueError):
    pass


class InconsistentOmegaN(PhiGammaError, ValueError):
    pass


class InsufficientWindow(PhiGammaError, IndexError):
    def __init__(self, missing, message=None):
        self.missing = missing
        super().__init__(message or f"window is short by {missing} entries")


class InsufficientPrecision(PhiGammaError, ArithmeticError):
    pass


class NonUnitDiagonal(PhiGammaError, ArithmeticError):
    pass


class NotInBKZ(PhiGammaError, ValueError):
    pass


class MomentConditionViolated(PhiGammaError, ValueError):
    pass


class SingularInput(PhiGammaError, ValueError):
    pass


class ValueOutsideLine(PhiGammaError, ValueError):
    pass


class UnknownSuite(PhiGammaError, KeyError):
    pass


class InvalidConfig(PhiGammaError, ValueError):
    pass
