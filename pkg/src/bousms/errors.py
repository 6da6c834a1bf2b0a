"""Exception hierarchy shared by all modules."""


class BousmsError(Exception):
    """Base class for library errors."""


class DomainError(BousmsError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class StructureError(BousmsError):
    """Coefficients do not satisfy the structural conditions required."""

    def __init__(self, message, violated=()):
        super().__init__(message)
        self.violated = list(violated)


class DegenerateError(BousmsError):
    """The traveling-wave reduction is singular (b d c_s^2 - a^2 = 0)."""


class NoBifurcationError(BousmsError):
    """Requested speed lies outside the bifurcation regime (c_s <= 1)."""


class WrongSolverError(BousmsError):
    """Solver does not match the eigenvalue regime of the setup."""


class UnsupportedRegimeError(BousmsError):
    """Coefficients fall in a regime the simulator does not handle."""


class ConvergenceError(BousmsError):
    """Iteration failed; carries the last iterate and residual history."""

    def __init__(self, message, last=None, history=None):
        super().__init__(message)
        self.last = last
        self.history = list(history or [])

    @property
    def last_residual(self):
        return self.history[-1] if self.history else float("nan")


class BlowUpError(BousmsError):
    """Time integration produced non-finite values."""

    def __init__(self, message, last_state=None):
        super().__init__(message)
        self.last_state = last_state
