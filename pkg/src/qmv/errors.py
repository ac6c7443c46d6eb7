"""Exception hierarchy shared by all modules."""


class QMVError(Exception):
    """Base class for every error raised by this package."""


class ParseError(QMVError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(QMVError, ValueError):
    pass


class UnknownVertexError(ValidationError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class NonBijectiveError(ValidationError):
    pass


class InvalidWeightError(ValidationError):
    pass


class InvalidCutError(ValidationError):
    pass


class NoCutError(ValidationError):
    pass


class PoleError(QMVError, ZeroDivisionError):
    pass


class NotDivisibleError(QMVError, ArithmeticError):
    pass


class NonReductionError(QMVError, ArithmeticError):
    """A sum that must be a Laurent polynomial kept a denominator."""


class CapExceededError(QMVError):
    pass


class UnsupportedQuiverError(QMVError):
    pass


class GenericityError(QMVError):
    pass


class TauAsymmetryError(QMVError):
    pass


class ShiftCollisionError(QMVError):
    pass


class PreconditionError(QMVError, ValueError):
    pass


class AcyclicityError(PreconditionError):
    pass
