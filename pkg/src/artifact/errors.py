"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input outside the domain where a formula or routine is defined."""


class SpecfunError(ArithmeticError):
    """A special-function evaluation failed (pole, non-convergence, range cap)."""


class IntegrationError(RuntimeError):
    """The ODE integrator or a quadrature failed to reach the tolerance."""
