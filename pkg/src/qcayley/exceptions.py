"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A parameter is outside its admissible range (q <= 1, eta out of [0, 1/2], ...)."""


class ForbiddenParameterError(ParameterError):
    """The coefficient w lies in the countable forbidden set for (q, eta)."""

    def __init__(self, message, k=None, branch=None):
        super().__init__(message)
        self.k = k
        self.branch = branch


class NotApplicableError(ValueError):
    """The requested analysis is undefined for these parameters (w = 0 or eta = 1/2)."""


class TruncationError(RuntimeError):
    """A series did not meet its convergence rule within the term cap."""

    def __init__(self, message, terms_used, last_term_mag2=None, partial_mag2=None):
        super().__init__(message)
        self.terms_used = terms_used
        self.last_term_mag2 = last_term_mag2
        self.partial_mag2 = partial_mag2


class ConvergenceError(RuntimeError):
    """An iteration failed to converge within the window (two-cycle search)."""

    def __init__(self, message, last_values=()):
        super().__init__(message)
        self.last_values = tuple(last_values)
