"""Shared exception types and the violation record used for validation results."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Violation:
    """One broken rule, attributable to a word span when span_index is set."""

    rule: str
    message: str
    span_index: int | None = None

    def to_dict(self) -> dict:
        return {"rule": self.rule, "message": self.message, "span_index": self.span_index}


class WorkbenchError(Exception):
    pass


class MediaFormatError(WorkbenchError):
    """Unreadable or unsupported media/transcript input."""


class ValidationFailure(WorkbenchError):
    """Raised when an input or request fails validation; carries the violations."""

    def __init__(self, violations: list[Violation]):
        self.violations = list(violations)
        super().__init__("; ".join(v.message for v in self.violations) or "validation failed")


class UnknownSessionError(WorkbenchError):
    def __init__(self, session_id: str):
        self.session_id = session_id
        super().__init__(f"unknown session: {session_id}")
