"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the domain of an operation."""


class NoPermittivityError(TypeError):
    """Raised when a permittivity is requested from a perfect mirror."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach its tolerance."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class ConvergenceError(RuntimeError):
    """A frequency sum was not converged within the allowed number of terms."""

    def __init__(self, message, partial=None, n_terms=None):
        super().__init__(message)
        self.partial = partial
        self.n_terms = n_terms


class IterationError(RuntimeError):
    """Self-consistent frequency refinement failed to settle."""


class PoleProximityError(ValueError):
    """Polarizability evaluated too close to one of its poles."""


class RateModelError(ValueError):
    """Rate matrix is not a valid generator of a relaxation process."""


class MultipleSteadyStatesError(ValueError):
    """Level graph is disconnected, so the steady state is not unique."""

    def __init__(self, message, components=()):
        super().__init__(message)
        self.components = components


class AccuracyWarning(UserWarning):
    """Result computed outside the regime where it is reliable."""
