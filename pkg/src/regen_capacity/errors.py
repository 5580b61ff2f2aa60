"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A run configuration field is missing, malformed, or out of domain."""


class AccuracyError(RuntimeError):
    """A numerical result failed its built-in accuracy check (e.g. mass leakage)."""


class ConvergenceError(RuntimeError):
    """An iterative solver exhausted its iteration budget before converging."""
