"""Custom exceptions for Selmer expansions."""


class SelmerException(Exception):
    """Base exception for Selmer expansion errors."""

    def __init__(self, message: str, details: str | None = None) -> None:
        self.message = message
        self.details = details
        super().__init__(message)

    def __str__(self) -> str:
        if self.details:
            return f"{self.message}: {self.details}"
        return self.message


class FieldMismatchException(SelmerException):
    """Exception raised when operands live in different number fields."""

    pass


class NumberFieldException(SelmerException):
    """Exception raised for invalid fields and impossible field arithmetic."""

    pass


class RefinementException(SelmerException):
    """Exception raised when interval refinement exceeds its budget."""

    pass


class DomainException(SelmerException):
    """Exception raised when a point or digit is outside the domain of a map."""

    pass


class SpectralException(SelmerException):
    """Exception raised when eigenvalue analysis of a matrix fails."""

    pass


class ExpressionParseException(SelmerException):
    """Exception raised when a field spec or point expression cannot be parsed."""

    pass


class OutputException(SelmerException):
    """Exception raised when writing output fails."""

    pass


class VerificationException(SelmerException):
    """Exception raised when an invariant suite fails."""

    pass
