"""Exception types shared across the package."""


class FrozenwalkError(Exception):
    """Base class for all package errors."""


class GenerationError(FrozenwalkError):
    """An environment entry fell outside (0,1), or a table file was malformed."""


class BoundsError(FrozenwalkError):
    """An operation required more environment sites (or sequence entries) than available."""


class UnsupportedModeError(FrozenwalkError):
    """The requested operation is not defined for this spec/representation."""


class ResourceCapError(FrozenwalkError):
    """A configured resource cap (piece count, grid size) would be exceeded."""


class ConfigError(FrozenwalkError):
    """An experiment configuration failed schema validation."""


class NumericQualityError(FrozenwalkError):
    """A numeric-quality check failed (e.g. probability mass deviation too large)."""
