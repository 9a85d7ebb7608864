"""Exception types raised across the package."""


class CoughDetError(Exception):
    """Base class for all package errors."""


class InputError(CoughDetError, ValueError):
    """Malformed or out-of-contract input data."""


class ConfigError(CoughDetError, ValueError):
    """Invalid configuration or hyperparameter combination."""


class LoadError(CoughDetError, OSError):
    """A file could not be read into a signal or event.

    The offending path is kept on ``path`` so callers can report it.
    """

    def __init__(self, path, message):
        self.path = str(path)
        super().__init__(f"{self.path}: {message}")
