"""Shared exception types; the CLI maps them to exit codes."""


class ConfigError(ValueError):
    """Invalid configuration file or CLI arguments (exit code 2)."""


class ResolutionError(RuntimeError):
    """Grid too coarse for the requested operation (exit code 3)."""

    def __init__(self, message: str, required_b: int | None = None):
        super().__init__(message)
        self.required_b = required_b


class NumericalFailure(RuntimeError):
    """A computation produced non-finite or inconsistent output (exit code 4)."""
