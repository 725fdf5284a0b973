"""Exception hierarchy shared by all modules.

Every error carries a short machine-readable ``code`` which the command line
front end prints as a prefix and maps onto an exit status.
"""


class CoreShellError(Exception):
    code = "error"


class DomainError(CoreShellError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""

    code = "bad-input"


class BesselRangeError(CoreShellError, OverflowError):
    """Bessel argument too large to evaluate without overflow."""

    code = "range"


class DegenerateConfigurationError(CoreShellError, ArithmeticError):
    code = "degenerate"


class GridAlignmentError(CoreShellError, ValueError):
    """The core radius does not fall on a grid node."""

    code = "bad-input"


class SolverError(CoreShellError, ArithmeticError):
    code = "solver"


class ConvergenceError(CoreShellError, ArithmeticError):
    """Newton iteration did not reach stationarity.

    ``last_iterate`` holds the final value of sigma so callers can inspect
    where the iteration stalled.
    """

    code = "convergence"

    def __init__(self, message, last_iterate=None, iterations=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.iterations = iterations


class DiscrepancyError(CoreShellError, ArithmeticError):
    code = "discrepancy"

    def __init__(self, message, residual_range=None):
        super().__init__(message)
        self.residual_range = residual_range


class ReconstructionError(CoreShellError):
    """Wraps a failure of one stage of the inversion pipeline."""

    code = "inversion"

    def __init__(self, stage, cause):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause


class NoRootError(CoreShellError, ArithmeticError):
    code = "no-root"

    def __init__(self, message, scan=None):
        super().__init__(message)
        self.scan = scan
