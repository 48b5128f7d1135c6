"""Exception types shared across the package."""


class DomainError(ValueError):
    """An evaluation point or region lies outside the allowed domain."""


class TruncationError(RuntimeError):
    """The truncation policy cannot be met within its order cap."""


class BoundaryZeroError(RuntimeError):
    """A zero appears to sit on (or too close to) an integration contour.

    Callers are expected to perturb the region slightly and retry; see
    ``gafzeros.zeros.count_in_region_robust``.
    """


class ConvergenceError(RuntimeError):
    """An iterative procedure failed to converge within its budget."""


class ConfigError(ValueError):
    """A configuration file or CLI parameter is malformed."""
