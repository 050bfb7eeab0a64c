"""Exception hierarchy shared across the package."""


class AllPassError(Exception):
    """Base class for errors raised by this package."""


class DomainError(AllPassError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class CausalityError(DomainError):
    """Autoregressive coefficients do not define a causal polynomial."""


class AssumptionError(AllPassError, ValueError):
    """A regularity condition required by the asymptotic theory fails.

    Raised, for example, when ``sigma^2 * L - K <= 0``, which makes the
    R-estimator's asymptotic variance undefined (Gaussian noise is the
    standard case).
    """


class QuadratureError(AllPassError, ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, abserr=None):
        super().__init__(message)
        self.abserr = abserr


class EstimationError(AllPassError, RuntimeError):
    """Minimization of the dispersion objective failed."""
