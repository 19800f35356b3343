"""Exception hierarchy shared across the package.

Every error carries a stable ``code`` (the class name) so the CLI and the
HTTP service can emit machine-parsable error bodies without string matching.
"""
from __future__ import annotations


class RxGuardError(Exception):
    """Base class for all package errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


class StorageFailure(RxGuardError):
    """An underlying filesystem operation failed."""
