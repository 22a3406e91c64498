"""Exception hierarchy shared across the package."""


class SphereGPError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(SphereGPError):
    """Invalid configuration, arguments, or inconsistent pipeline inputs."""


class ResolutionError(ConfigError):
    """Grid resolution insufficient for the requested harmonic truncation."""


class ValidityError(SphereGPError):
    """Numerical validity failure: non-positive-definite covariance, degenerate
    Gaussian measure, singular determinant, or a Cholesky factorization that
    fails beyond the jitter budget."""
