"""Exception hierarchy shared by every geomodal app."""

from typing import Any, Dict, Optional


class GeomodalError(Exception):
    """Base exception for geomodal errors."""

    error_type = "error"

    def __init__(self, message: str, *, path: Optional[str] = None, **details: Any):
        super().__init__(message)
        self.message = message
        self.path = path
        self.details = details

    def as_dict(self) -> Dict[str, Any]:
        """Machine-readable form used by CLI error bodies."""
        body: Dict[str, Any] = {"type": self.error_type, "message": self.message}
        if self.path:
            body["path"] = self.path
        if self.details:
            body["details"] = self.details
        return body


class InvalidInputError(GeomodalError):
    """Raised when an input object violates a documented invariant."""

    error_type = "invalid_input"


class UnknownIdentifierError(InvalidInputError):
    """Raised for unknown functor, lifting, system or proposition identifiers."""

    error_type = "unknown_identifier"


class FormulaSyntaxError(InvalidInputError):
    """Raised when formula text does not match the grammar."""

    error_type = "syntax"

    def __init__(self, message: str, *, line: int = 0, column: int = 0, **details: Any):
        super().__init__(message, line=line, column=column, **details)
        self.line = line
        self.column = column


class ResourceBoundError(GeomodalError):
    """Raised when an enumeration would exceed a configured bound."""

    error_type = "resource_bound"


class InvariantViolation(GeomodalError):
    """Raised when an internal consistency check fails."""

    error_type = "invariant"
