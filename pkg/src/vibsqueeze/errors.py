"""Exception hierarchy.

Every error carries a short machine-readable ``code`` that the sweep engine
writes into the ``error_code`` column.
"""


class VibSqueezeError(Exception):
    """Base class for all package errors."""

    code = "error"

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details


class ConfigError(VibSqueezeError, ValueError):
    """Invalid configuration document or parameter block.

    ``path`` points at the offending field, e.g. ``"system.detuning.value"``.
    """

    code = "config"

    def __init__(self, message, path=""):
        full = f"{path}: {message}" if path else message
        super().__init__(full, path=path)
        self.path = path


class InvalidStateError(VibSqueezeError, ValueError):
    """A matrix or Bloch vector violates the state invariants."""

    code = "invalid_state"


class QuadratureError(VibSqueezeError, ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    code = "quadrature"

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message, estimate=estimate, error=error)
        self.estimate = estimate
        self.error = error


class ConvergenceError(VibSqueezeError, ArithmeticError):
    """Self-consistent iteration did not converge."""

    code = "no_convergence"

    def __init__(self, message, last=None, residual=None):
        super().__init__(message, last=last, residual=residual)
        self.last = last
        self.residual = residual


class DegenerateLiouvillianError(VibSqueezeError, ArithmeticError):
    """The Liouvillian kernel is not one dimensional."""

    code = "degenerate_kernel"


class StepBudgetError(VibSqueezeError, ArithmeticError):
    """Time propagation exhausted its step budget."""

    code = "step_budget"


class PositivityError(VibSqueezeError, ArithmeticError):
    """Steady state has an eigenvalue below the tolerated floor."""

    code = "positivity"
