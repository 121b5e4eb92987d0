"""Exception types shared across the package."""


class GspearError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatchError(GspearError):
    """Vector/functional/operator shapes do not match the declared spaces."""


class UnsupportedSpaceError(GspearError):
    """The requested operation is not available for this space or field."""


class NotNormalizedError(GspearError):
    """An operator that must satisfy ``norm == 1`` does not."""


class DegenerateSeminormError(GspearError):
    """The G-seminorm of the operator vanishes, so no supporting structure exists."""


class ValidationError(GspearError):
    """A problem file failed validation; the message carries the JSON path."""
