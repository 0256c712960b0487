"""Exception hierarchy shared by every module.

Each exception carries a machine-readable ``code`` and the process exit
status the command-line front end maps it to.
"""


class OrbitError(Exception):
    """Base class for all library errors."""

    code = "INTERNAL"
    exit_status = 5

    def __init__(self, message, code=None):
        super().__init__(message)
        if code is not None:
            self.code = code


class SpecError(OrbitError, ValueError):
    """Invalid group family, size parameter or coordinate vector."""

    code = "INVALID_VALUE"
    exit_status = 2


class DegenerateFamilyError(SpecError):
    code = "DEGENERATE_FAMILY"


class ParseError(SpecError):
    code = "MALFORMED_INPUT"


class EnumerationCapError(OrbitError, ValueError):
    code = "ENUMERATION_CAP"
    exit_status = 5


class InfeasibleError(OrbitError):
    """Target mean is not in the interior of the orbit's convex hull."""

    code = "INFEASIBLE"
    exit_status = 3


class OracleOverflowError(OrbitError, ArithmeticError):
    """The determinant formulas could not be evaluated in double precision.

    ``scale`` is the largest exponent magnitude seen, ``condition`` the
    log-domain cancellation estimate at failure.
    """

    code = "NUMERIC_OVERFLOW"
    exit_status = 4

    def __init__(self, message, scale=float("nan"), condition=float("nan")):
        super().__init__(message)
        self.scale = scale
        self.condition = condition
