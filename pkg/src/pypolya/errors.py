"""Exception types raised by the library; the CLI maps them to exit codes."""


class PolyaError(Exception):
    """Base class for every error the library raises on purpose."""


class DomainError(PolyaError, ValueError):
    """A parameter lies outside the domain of the operation."""


class ValidationError(PolyaError, ValueError):
    """User supplied data or configuration is malformed."""


class FormatError(PolyaError):
    """An interchange file is unreadable, of the wrong kind or version."""
