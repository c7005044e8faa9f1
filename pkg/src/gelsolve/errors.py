"""Exception hierarchy shared by all gelsolve modules."""


class GelsolveError(Exception):
    """Base class for errors raised by this package."""


class DomainError(GelsolveError, ValueError):
    """An argument is outside the mathematical domain of the operation."""


class ModelError(GelsolveError, ValueError):
    """The model cannot be applied to the given initial data."""


class SolverError(GelsolveError, RuntimeError):
    """A numerical routine failed to converge or went unstable."""


class ConfigError(GelsolveError, ValueError):
    """A run configuration is malformed or inconsistent."""


class UsageError(GelsolveError, ValueError):
    """Mismatched inputs to a utility, e.g. incompatible time grids."""
