"""Exception hierarchy shared by every module."""


class NilpadicError(Exception):
    """Base class; ``kind`` is the machine-readable tag used in CLI error records."""

    kind = "error"

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class InvalidInput(NilpadicError, ValueError):
    kind = "invalid-input"


class PrecisionExhausted(NilpadicError, ArithmeticError):
    kind = "precision-exhausted"


class ClosureFailure(NilpadicError):
    kind = "closure-failure"


class NotInGroup(NilpadicError):
    kind = "not-in-group"


class SpecValidationError(NilpadicError):
    kind = "invalid-spec"

    def __init__(self, message, check=None, witness=None):
        super().__init__(message, witness)
        self.check = check


class OracleCapExceeded(NilpadicError):
    kind = "oracle-cap-exceeded"


class InvariantViolation(NilpadicError, AssertionError):
    kind = "invariant-violation"
