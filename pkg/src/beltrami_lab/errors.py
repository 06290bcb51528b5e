"""Exception types shared across the package."""


class DomainError(ValueError):
    """Raised when an operation is evaluated outside its domain (z = z0, z at infinity, ...)."""


class ConvergenceError(RuntimeError):
    """Raised when the fixed-point solver does not reach its tolerance."""

    def __init__(self, message, contraction=None, iterations=None, residual=None):
        super().__init__(message)
        self.contraction = contraction
        self.iterations = iterations
        self.residual = residual


class ConfigError(ValueError):
    """Invalid run configuration. ``key`` and ``line`` locate the offending entry when known."""

    def __init__(self, message, key=None, line=None):
        loc = []
        if key is not None:
            loc.append(f"key '{key}'")
        if line is not None:
            loc.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(loc)})" if loc else message)
        self.key = key
        self.line = line
