from fastapi import HTTPException
from src.utils.logger import get_logger

logger = get_logger(__name__)


class FuzzyDrError(Exception):
    """Base error of the toolkit. Carries a CLI exit code and an HTTP status."""

    exit_code = 2
    status_code = 422

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.message = message
        self.details = details


class UsageError(FuzzyDrError):
    exit_code = 1
    status_code = 400


class DataError(FuzzyDrError):
    exit_code = 2
    status_code = 422


class NumericalError(FuzzyDrError):
    exit_code = 3
    status_code = 500


class InvalidParams(UsageError):
    pass


class InvalidK(UsageError):
    pass


class EmptyVocabulary(DataError):
    pass


class MalformedLine(DataError):
    def __init__(self, message: str, line_number: int):
        super().__init__(message, line_number=line_number)
        self.line_number = line_number


class UnknownLabel(DataError):
    pass


class SingleClass(DataError):
    pass


class ParseError(DataError):
    def __init__(self, message: str, offset: int):
        super().__init__(message, offset=offset)
        self.offset = offset


class MissingDirectory(DataError):
    pass


class MissingFile(DataError):
    pass


class InsufficientDocuments(DataError):
    pass


class TooFewDocuments(DataError):
    pass


class TooFewPerClass(DataError):
    pass


class DimensionMismatch(DataError):
    pass


class EmptyMatrix(DataError):
    pass


class InsufficientPoints(DataError):
    pass


class ConvergenceFailure(NumericalError):
    def __init__(self, message: str, residual: float):
        super().__init__(message, residual=residual)
        self.residual = residual


class NonConvergence(NumericalError):
    def __init__(self, message: str, gradient_norm: float):
        super().__init__(message, gradient_norm=gradient_norm)
        self.gradient_norm = gradient_norm


class IdenticalPrototypes(NumericalError):
    pass


def raise_domain_error(error_cls, message: str, **details):
    """Logs and raises a toolkit error."""
    logger.error(message)
    raise error_cls(message, **details)


def raise_http_error(status_code: int, message: str):
    """Logs and raises an HTTP exception for the API layer."""
    logger.error(message)
    raise HTTPException(status_code=status_code, detail={"message": message, "status_code": status_code})
