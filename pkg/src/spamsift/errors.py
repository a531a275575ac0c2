"""Exception types shared across the package."""


class SpamsiftError(Exception):
    """Base class for all package errors."""


class InvalidPatternError(SpamsiftError):
    """Raised for unusable search patterns (e.g. empty)."""


class InvalidUrlError(SpamsiftError):
    """Raised when a URL cannot be reduced to scheme + host."""


class ConfigError(SpamsiftError):
    """Raised for invalid configuration values or files."""


class SchemaError(SpamsiftError):
    """Raised when an attribute name is not part of the record schema."""


class DatasetParseError(SpamsiftError):
    """Raised for malformed dataset files; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(SpamsiftError):
    """Raised when data violates an operation's preconditions."""


class ModelFormatError(SpamsiftError):
    """Raised for unreadable or version-incompatible model files."""
