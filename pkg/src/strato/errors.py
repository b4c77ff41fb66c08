"""Exception hierarchy shared by the solver modules."""


class StratoError(Exception):
    """Base class for every error raised by this package."""


class InvalidParams(StratoError, ValueError):
    pass


class NonConvergence(StratoError, ArithmeticError):
    pass


class DegenerateConnection(StratoError, ArithmeticError):
    """The 1/z connection formula is ill-conditioned because a - b is near an integer."""


class DomainError(StratoError, ValueError):
    pass


class Divergent(StratoError, ArithmeticError):
    pass


class InvalidMode(StratoError, ValueError):
    pass


class StepFailure(StratoError, ArithmeticError):
    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class TruncationError(StratoError, ValueError):
    pass


class UnsupportedCombination(StratoError, ValueError):
    pass


class QuadratureFailure(StratoError, ArithmeticError):
    def __init__(self, message, panel=None):
        super().__init__(message)
        self.panel = panel


class NotConvex(StratoError, ValueError):
    pass


class BadWindow(StratoError, ValueError):
    pass


class InsufficientData(StratoError, ValueError):
    pass


class NonPositiveValues(StratoError, ValueError):
    pass


class ConfigError(StratoError, ValueError):
    pass


class ExperimentError(StratoError):
    """A failure inside run_experiment, tagged with the stage that raised it."""

    def __init__(self, stage, cause):
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause
