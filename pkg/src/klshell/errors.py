"""Exception types shared across the package."""


class DomainError(ValueError):
    """A parametric coordinate lies outside the knot range."""


class SingularGeometryError(RuntimeError):
    """Surface tangents are degenerate (a1 x a2 = 0) at an evaluation point."""


class BasisConventionError(ValueError):
    """A tensor triple was used in the wrong basis (e.g. transformed twice)."""


class IndefiniteSystemError(RuntimeError):
    """A factorization pivot was non-positive: system is not positive definite."""


class SingularSystemError(RuntimeError):
    """The reduced system is numerically singular."""


class NumericalError(RuntimeError):
    """A solve failed to reach the required residual tolerance."""
