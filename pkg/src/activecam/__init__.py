"""Active control of camera shutter/gain driven by detector performance tables."""

from activecam.errors import ParseError, ValidationError

__version__ = "0.1.0"

__all__ = ["ParseError", "ValidationError", "__version__"]
