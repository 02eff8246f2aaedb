"""Error types. Every error carries a stable ``code`` string used by the CLI reports."""


class TCocycleError(Exception):
    code = "ERROR"
    exit_status = 1

    def __init__(self, message: str = "", **context):
        super().__init__(message or self.code)
        self.context = context

    def __str__(self):
        msg = super().__str__()
        return msg if msg.startswith(self.code) else f"{self.code}: {msg}"


class FieldMismatch(TCocycleError):
    code = "FIELD_MISMATCH"


class DivisionByZero(TCocycleError, ZeroDivisionError):
    code = "DIVISION_BY_ZERO"


class DivisionByZeroFunction(DivisionByZero):
    code = "DIVISION_BY_ZERO_FUNCTION"


class CharDividesFactorial(TCocycleError):
    code = "CHAR_DIVIDES_FACTORIAL"


class ExpressionSyntaxError(TCocycleError):
    code = "SYNTAX_ERROR"

    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(f"{message} at position {position}", position=position)
        self.message = message
        self.position = position
        self.text = text


class UnknownVariable(TCocycleError):
    code = "UNKNOWN_VARIABLE"


class SubstitutedDenominatorZero(TCocycleError):
    code = "SUBSTITUTED_DENOMINATOR_ZERO"


class NotLaurent(TCocycleError):
    code = "NOT_LAURENT"


class ChartMismatch(TCocycleError):
    code = "CHART_MISMATCH"


class DimensionMismatch(TCocycleError):
    code = "DIMENSION_MISMATCH"


class NotSquare(TCocycleError):
    code = "NOT_SQUARE"


class SingularMatrix(TCocycleError):
    code = "SINGULAR_MATRIX"


class PairNotInNerve(TCocycleError):
    code = "PAIR_NOT_IN_NERVE"


class RankMismatch(TCocycleError):
    code = "RANK_MISMATCH"


class MissingCoordinateChange(TCocycleError):
    code = "MISSING_COORDINATE_CHANGE"


class IndexOutOfRange(TCocycleError):
    code = "INDEX_OUT_OF_RANGE"


class InvalidBundle(TCocycleError):
    code = "INVALID_BUNDLE"


class NotFlagPresented(TCocycleError):
    code = "NOT_FLAG_PRESENTED"


class NotRankOne(TCocycleError):
    code = "NOT_RANK_ONE"


class InvalidParameters(TCocycleError):
    code = "INVALID_PARAMETERS"


class WrongCover(TCocycleError):
    code = "WRONG_COVER"


# Failures of identities that hold unconditionally: these signal bugs, exit status 2.

class CocycleCheckFailed(TCocycleError):
    code = "COCYCLE_CHECK_FAILED"
    exit_status = 2


class DClosedCheckFailed(TCocycleError):
    code = "DCLOSED_CHECK_FAILED"
    exit_status = 2


class WitnessVerificationFailed(TCocycleError):
    code = "WITNESS_VERIFICATION_FAILED"
    exit_status = 2
