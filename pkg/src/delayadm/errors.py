"""Exception hierarchy.

Each family carries the CLI exit code it maps to (``exit_code``).
"""


class DelayAdmError(Exception):
    exit_code = 1


class ValidationError(DelayAdmError, ValueError):
    exit_code = 2


class DelayNonPositive(ValidationError):
    pass


class EigenvalueOutOfRange(ValidationError):
    pass


class InvalidArgument(ValidationError):
    pass


class ParseError(ValidationError):
    def __init__(self, message, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.line = line
        self.field = field


class IndexRangeError(ValidationError, IndexError):
    pass


class IncompatibleInit(ValidationError):
    pass


class StepTooCoarse(ValidationError):
    pass


class OffGrid(ValidationError):
    pass


class HypothesisViolation(DelayAdmError):
    exit_code = 3


class NotInRegion(HypothesisViolation):
    pass


class NoRoot(HypothesisViolation):
    pass


class DegenerateRegion(HypothesisViolation):
    pass


class NumericalFailure(DelayAdmError, ArithmeticError):
    exit_code = 4


class ToleranceNotMet(NumericalFailure):
    pass


class NoConvergence(NumericalFailure):
    pass


class ContourTooClose(NumericalFailure):
    pass


class DenominatorNearZero(NumericalFailure):
    pass


class NearDegenerate(NumericalFailure):
    pass
