"""Exception types raised by the package."""


class ConfigurationError(ValueError):
    """Invalid configuration value.

    ``key_path`` carries the dotted location of the offending entry when the
    error originates from a config document (e.g. ``rwls.forgetting``).
    """

    def __init__(self, message, key_path=None):
        self.key_path = key_path
        if key_path:
            message = f"{key_path}: {message}"
        super().__init__(message)


class NumericalBreakdownError(ArithmeticError):
    """A recursive estimator hit a non-positive innovation variance."""
