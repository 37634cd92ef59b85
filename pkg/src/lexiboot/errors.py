"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid run parameters (dimensions, context size, mode, ...)."""


class NotFrozenError(ValueError):
    """Communication measures are defined only for frozen (binary) matrices."""


class FitError(ValueError):
    """Linear extrapolation needs >= 2 points with distinct abscissae."""
