"""Exception types shared across the package."""


class BacnomaError(Exception):
    """Base class for all package-specific errors."""


class InvalidParameterError(BacnomaError):
    """A scenario parameter or function argument violates its contract."""


class ConfigError(BacnomaError):
    """A config file could not be read or contains unknown/invalid keys."""


class InternalConsistencyError(BacnomaError):
    """A numerical invariant that only a solver bug can break was violated."""
