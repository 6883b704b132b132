"""Exceptions raised by the chaos-dd solvers and experiment pipeline."""


class ChaosDDError(Exception):
    """Base class for all chaos-dd errors."""


class InvalidArgumentError(ChaosDDError, ValueError):
    """Raised when an argument violates an operation's preconditions."""


class NumericFailureError(ChaosDDError, ArithmeticError):
    """Raised when a factorization, eigensolver or residual check fails."""


class NonConvergenceError(ChaosDDError):
    """Raised when an iteration exhausts its budget without meeting the tolerance."""

    def __init__(self, message, residuals):
        super().__init__(message)
        self.residuals = list(residuals)
        self.last_residual = self.residuals[-1] if self.residuals else None


class ExperimentError(ChaosDDError):
    """Raised when an experiment phase fails; carries the phase name."""

    PHASES = ('reference', 'gaussian', 'adaptation', 'subdomain', 'metrics', 'output')

    def __init__(self, phase, message):
        super().__init__(f'[{phase}] {message}')
        self.phase = phase
