"""Exception and warning types shared across the package."""


class SmallHolesError(Exception):
    """Base class for all package errors."""


class DomainError(SmallHolesError):
    """A point lies outside the domain of validity of an evaluation."""


class GeometryError(SmallHolesError):
    """Invalid geometric configuration (overlap, touching boundary, ...)."""


class ScaleDegeneracyError(SmallHolesError):
    """The logarithmic gauge denominator is too small for the requested size."""


class DegenerateConfigurationError(SmallHolesError):
    """Interaction system is singular or numerically untrustworthy."""


class MapFitError(SmallHolesError):
    """Least-squares map fit did not reach the required residual."""

    def __init__(self, residual, message=None):
        self.residual = residual
        super().__init__(message or f"map fit residual {residual:.3e} above tolerance")


class ConfigError(SmallHolesError):
    """Malformed scene configuration file."""


class SolverError(SmallHolesError):
    """A dense solve was rejected (ill-conditioned placement, bad residual)."""


class ResolutionWarning(UserWarning):
    """Boundary data looks under-resolved at the current sample count."""


class GeometryWarning(UserWarning):
    """Geometry is valid but outside the comfortable asymptotic range."""
