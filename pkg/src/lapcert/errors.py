"""Exception types raised across the library."""


class LapcertError(Exception):
    """Base class for all library-specific errors."""


class ConditionViolatedError(LapcertError):
    """A spectral precondition of a closed-form Gaussian integral failed.

    Carries the offending eigenvalue of the conjugated operator.
    """

    def __init__(self, eigenvalue, limit=1.0):
        self.eigenvalue = float(eigenvalue)
        self.limit = float(limit)
        super().__init__(
            f"spectral precondition violated: eigenvalue {self.eigenvalue:.6g} "
            f"is not strictly below {self.limit:.6g}"
        )


class NotPositiveDefiniteError(LapcertError):
    """A matrix required to be positive definite is not.

    Carries the smallest eigenvalue encountered.
    """

    def __init__(self, smallest_eigenvalue, what="matrix"):
        self.smallest_eigenvalue = float(smallest_eigenvalue)
        super().__init__(
            f"{what} is not positive definite "
            f"(smallest eigenvalue {self.smallest_eigenvalue:.6g})"
        )


class MaxIterationsError(LapcertError):
    """The Newton solver ran out of iterations or line-search halvings."""


class IndefiniteHessianError(LapcertError):
    """The optimizer converged to a stationary point with an indefinite Hessian.

    Such a point is a saddle; a Gaussian approximation built there would not
    have a valid covariance, so the point is rejected rather than repaired.
    """


class DivergentIntegralError(LapcertError):
    """exp(-q) is not integrable against the prior for the given quadratic q."""


class UnknownModelError(LapcertError, KeyError):
    """Requested built-in model name is not registered."""


class ProblemSpecError(LapcertError):
    """A problem description file could not be parsed or validated."""
