"""Exception types shared across the package.

Each exception carries a stable ``code`` string; the CLI maps codes to exit
statuses and prints the code on standard error.
"""


class HosearmError(Exception):
    code = "ERROR"
    exit_status = 4

    def __init__(self, message="", field=None):
        self.field = field
        super().__init__(f"{self.code}: {message}" if message else self.code)


class ValidationError(HosearmError, ValueError):
    code = "VALIDATION_ERROR"
    exit_status = 2


class ParseError(ValidationError):
    code = "PARSE_ERROR"


class LengthMismatch(ValidationError):
    code = "LENGTH_MISMATCH"


class NonpositiveLength(ValidationError):
    code = "NONPOSITIVE_LENGTH"


class UnsortedProfile(ValidationError):
    code = "UNSORTED_PROFILE"


class NotWristPartitioned(ValidationError):
    code = "NOT_WRIST_PARTITIONED"


class VerticalJet(ValidationError):
    code = "VERTICAL_JET"


# "no solution" family (exit 3)

class NoSolution(HosearmError):
    code = "NO_SOLUTION"
    exit_status = 3


class Unreachable(NoSolution):
    code = "UNREACHABLE"


class ShoulderSingularity(NoSolution):
    code = "SHOULDER_SINGULARITY"


class OutOfRange(NoSolution):
    code = "OUT_OF_RANGE"


class UnreachablePose(NoSolution):
    code = "UNREACHABLE_POSE"


class NoRealSolution(NoSolution):
    code = "NO_REAL_SOLUTION"


class ZeroFlow(NoSolution):
    code = "ZERO_FLOW"


# numerical failures (exit 4)

class NumericalFailure(HosearmError):
    code = "NUMERICAL_FAILURE"
    exit_status = 4


class MaxIterations(NumericalFailure):
    """Iteration budget exhausted; ``best`` holds the best iterate found."""

    code = "MAX_ITER"

    def __init__(self, message="", best=None, trace=None, field=None):
        self.best = best
        self.trace = list(trace or [])
        super().__init__(message, field)


class Diverged(MaxIterations):
    code = "DIVERGED"


class IoFailure(ValidationError):
    code = "IO_ERROR"
