"""Exception hierarchy shared across the package.

Data-shaped failures (bad input files, invariant violations) derive from
:class:`DataError`; failures talking to an answer/judge service derive from
:class:`BackendError`. The CLI maps these onto distinct exit codes.
"""

from __future__ import annotations


class SegError(Exception):
    """Base class for all errors raised by this package."""


class DataError(SegError):
    """Invalid input data or a violated data invariant."""


class SchemaError(DataError):
    """A document does not match its JSON schema.

    ``path`` names the offending location, e.g. ``frames[3].detections[0].bbox``.
    """

    def __init__(self, path: str, message: str) -> None:
        super().__init__(f"{path}: {message}")
        self.path = path


class IdentityConflictError(DataError):
    """The same track id appears with two different labels in one log."""


class FrameOrderError(DataError):
    """Frame indices are not strictly increasing or timestamps decrease."""


class AlternationError(DataError):
    """A pair's event sequence violates the START/END alternation contract."""


class InfeasibleSpecError(DataError):
    """A synthetic scenario asks for contradictory entity placements."""


class UndefinedScoreError(DataError):
    """Lexical score requested for a query with no content tokens."""


class BackendError(SegError):
    """An answer or judge backend failed (network, protocol, auth)."""


class MalformedResponseError(BackendError):
    """A backend replied with a body that does not match the wire contract."""
