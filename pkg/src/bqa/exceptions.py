"""Exception types raised across the package."""


class InvalidArgumentError(ValueError):
    """An argument violates a documented precondition."""


class InstanceParseError(InvalidArgumentError):
    """An instance file could not be parsed or failed validation."""


class CapacityError(RuntimeError):
    """The requested problem size exceeds a hard capacity bound."""


class IndeterminateError(RuntimeError):
    """A quantity is undefined for the given input (e.g. a degenerate ground state)."""


class DegenerateGroundStateError(IndeterminateError):
    """An eigenproblem has a degenerate lowest level where a unique state is required."""


class IntegrationError(RuntimeError):
    """Time integration failed to reach the requested tolerance within its step budget."""

    def __init__(self, message, *, t_reached=None, steps=None):
        super().__init__(message)
        self.t_reached = t_reached
        self.steps = steps


class ConvergenceError(RuntimeError):
    """A self-consistent solve did not converge; carries the best grid estimate."""

    def __init__(self, message, *, fallback=None):
        super().__init__(message)
        self.fallback = fallback
