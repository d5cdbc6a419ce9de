"""
Error Handler Utilities for COPQ bench.

Provides the exception hierarchy shared by every module, error
formatting, and the decorator that turns errors into CLI exit codes.
"""

import logging
import sys
import traceback
from datetime import datetime, timezone
from functools import wraps
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CAPABILITY = 2


class CopqError(Exception):
    """Base exception class for COPQ bench."""

    def __init__(self, message: str, code: str = "GENERAL_ERROR",
                 details: Optional[str] = None, exit_code: int = EXIT_VALIDATION):
        self.message = message
        self.code = code
        self.details = details
        self.exit_code = exit_code
        self.timestamp = datetime.now(timezone.utc).isoformat()
        super().__init__(self.message)

    def to_dict(self) -> Dict[str, Any]:
        """Convert error to dictionary format."""
        error_dict = {
            'code': self.code,
            'message': self.message,
            'timestamp': self.timestamp
        }
        if self.details:
            error_dict['details'] = self.details
        return error_dict


class ValidationError(CopqError):
    """Invalid argument: bad dimensions, bad config values, bad permutations."""

    def __init__(self, message: str, details: Optional[str] = None):
        super().__init__(
            message=message,
            code="VALIDATION_ERROR",
            details=details,
            exit_code=EXIT_VALIDATION
        )


class ParseError(CopqError):
    """Malformed instance or circuit file."""

    def __init__(self, message: str, line: int, column: int,
                 path: Optional[str] = None):
        self.line = line
        self.column = column
        self.path = path
        where = f"{path}:" if path else ""
        super().__init__(
            message=f"{where}{line}:{column}: {message}",
            code="PARSE_ERROR",
            details=f"line {line}, column {column}",
            exit_code=EXIT_VALIDATION
        )

    def to_dict(self) -> Dict[str, Any]:
        error_dict = super().to_dict()
        error_dict['line'] = self.line
        error_dict['column'] = self.column
        return error_dict


class BindingError(CopqError):
    """A symbolic circuit parameter was not bound before simulation."""

    def __init__(self, message: str, details: Optional[str] = None):
        super().__init__(
            message=message,
            code="BINDING_ERROR",
            details=details,
            exit_code=EXIT_VALIDATION
        )


class UnsupportedGateError(CopqError):
    """Gate kind with no matrix or no decomposition rule."""

    def __init__(self, gate: str, details: Optional[str] = None):
        super().__init__(
            message=f"Unsupported gate: {gate}",
            code="UNSUPPORTED_GATE",
            details=details,
            exit_code=EXIT_VALIDATION
        )


class ReportError(CopqError):
    """Report could not be written or read."""

    def __init__(self, message: str, path: Optional[str] = None,
                 details: Optional[str] = None):
        self.path = path
        super().__init__(
            message=f"{message} ({path})" if path else message,
            code="REPORT_ERROR",
            details=details,
            exit_code=EXIT_VALIDATION
        )


class VerificationError(CopqError):
    """An oracle-equivalence check failed."""

    def __init__(self, message: str, details: Optional[str] = None):
        super().__init__(
            message=message,
            code="VERIFICATION_FAILED",
            details=details,
            exit_code=EXIT_VALIDATION
        )


class CapabilityError(CopqError):
    """The requested size/method combination cannot run on this build."""

    def __init__(self, message: str, details: Optional[str] = None,
                 code: str = "CAPABILITY_ERROR"):
        super().__init__(
            message=message,
            code=code,
            details=details,
            exit_code=EXIT_CAPABILITY
        )


class SizeLimitError(CapabilityError):
    """Input exceeds a hard size guard (n!, 2^q or memory growth)."""

    def __init__(self, message: str, limit: int, actual: int):
        self.limit = limit
        self.actual = actual
        super().__init__(
            message=message,
            details=f"limit {limit}, got {actual}",
            code="SIZE_LIMIT"
        )


def format_error_response(error: Exception,
                          include_traceback: bool = False) -> Dict[str, Any]:
    """
    Format an exception into a standardized error dictionary.

    Args:
        error: The exception to format
        include_traceback: Whether to include the traceback (for debugging)

    Returns:
        Dictionary with an 'error' entry and the process exit code
    """
    if isinstance(error, CopqError):
        response = {'error': error.to_dict(), 'exit_code': error.exit_code}
    else:
        response = {
            'error': {
                'code': 'INTERNAL_ERROR',
                'message': f'An unexpected error occurred: {error}',
                'timestamp': datetime.now(timezone.utc).isoformat()
            },
            'exit_code': EXIT_VALIDATION
        }
        logger.error(f"Unexpected error: {str(error)}", exc_info=True)

    if include_traceback:
        response['error']['traceback'] = traceback.format_exc()

    return response


def handle_errors(include_traceback: bool = False):
    """
    Decorator for CLI sub-commands: returns the wrapped exit code, or
    maps a raised error to its exit code after reporting it.

    Usage:
        @handle_errors()
        def cmd_solve(args) -> int:
            ...
    """
    def decorator(f):
        @wraps(f)
        def wrapped(*args, **kwargs) -> int:
            try:
                return f(*args, **kwargs)
            except CopqError as e:
                if e.exit_code == EXIT_CAPABILITY:
                    logger.warning(f"Capability error in {f.__name__}: {e.message}")
                else:
                    logger.warning(f"Validation error in {f.__name__}: {e.message}")
                response = format_error_response(e, include_traceback)
                print(f"error: [{e.code}] {e.message}", file=sys.stderr)
                if e.details:
                    print(f"       {e.details}", file=sys.stderr)
                return response['exit_code']
            except Exception as e:
                logger.error(f"Unexpected error in {f.__name__}: {str(e)}", exc_info=True)
                response = format_error_response(e, include_traceback)
                print(f"error: {response['error']['message']}", file=sys.stderr)
                return response['exit_code']

        return wrapped
    return decorator
