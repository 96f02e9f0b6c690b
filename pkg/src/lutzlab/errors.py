"""Exception types shared across the package."""


class LutzLabError(Exception):
    """Base class for all package errors."""


class InvalidGeometry(LutzLabError):
    """A profile pair or twist parameter set cannot define a valid tube form."""


class QuadratureFailure(LutzLabError):
    """A numerical integral did not converge to the requested tolerance."""


class SingularLocus(LutzLabError):
    """The never-parallel determinant vanishes where a field value is needed."""


class NotSymplectic(LutzLabError):
    """A matrix path sample drifted off the determinant-one constraint."""


class PreconditionFailed(LutzLabError):
    """A certified quantity was requested without its certificate."""


class DomainViolation(LutzLabError):
    """A parameter point lies outside the admissible half-plane."""


class InfeasibleCompensation(LutzLabError):
    """The volume-compensating bump would drive the form multiplier too low."""


class BasisOverflow(LutzLabError):
    """A boundary image leaves the truncated monomial basis."""
