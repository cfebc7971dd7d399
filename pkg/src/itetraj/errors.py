"""Exception hierarchy shared by all modules."""


class ItetrajError(Exception):
    """Base class for all package errors."""


class DomainError(ItetrajError, ValueError):
    """Argument outside a documented validity window."""


class SingularityError(ItetrajError, ValueError):
    """Evaluation at a singular point of a special function or kernel."""


class ContractError(ItetrajError, ValueError):
    """A documented precondition on the inputs does not hold."""


class NearIdeError(ItetrajError, ArithmeticError):
    """Trajectory velocity blows up because the iterate sits on a Dirichlet eigenvalue."""


class SingularCoefficientError(ItetrajError, ArithmeticError):
    """Boundary-matching coefficient has a vanishing denominator."""


class ContourError(ItetrajError):
    """A root lies on or too close to the integration contour."""


class SubdivisionRequired(ItetrajError):
    """Moment system too ill-conditioned; the caller should split the box."""


class NoConvergenceError(ItetrajError):
    """Iteration failed to converge. ``trace`` holds the iterates."""

    def __init__(self, message, trace=()):
        super().__init__(message)
        self.trace = list(trace)


class BranchJumpError(ItetrajError):
    """Continuation jumped to a different root branch."""

    def __init__(self, message, dump=None):
        super().__init__(message)
        self.dump = dump or {}


class StepFailureError(ItetrajError):
    """Continuation could not keep the residual below tolerance."""


class ResolutionError(ItetrajError):
    """Too few samples near an event to estimate it."""


class GeometryError(ItetrajError, ValueError):
    """Degenerate or unsupported scatterer description."""


class LayoutError(ItetrajError, ValueError):
    """MFS auxiliary points violate containment or coincide with collocation points."""


class UnsupportedShapeError(ItetrajError):
    """No closed-form Dirichlet eigenvalue table exists for the shape."""


class SpuriousMinimumError(ItetrajError):
    """Local misfit minimum above the acceptance threshold."""

    def __init__(self, message, location=None, value=None):
        super().__init__(message)
        self.location = location
        self.value = value


class NumericalError(ItetrajError, ArithmeticError):
    """Dense linear algebra kernel failed."""
