"""Exception hierarchy shared by every module.

Each error maps onto one CLI exit code, so callers can tell a usage
mistake from a construction that merely ran out of window.
"""
from __future__ import annotations


class CoarseGridError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class UsageError(CoarseGridError):
    """Invalid parameters, unknown names, malformed files."""

    exit_code = 3


class OutOfWindowError(CoarseGridError):
    """A vertex was referenced that the materialized window does not contain."""

    exit_code = 3

    def __init__(self, vertex, message: str | None = None):
        self.vertex = vertex
        super().__init__(message or f"vertex {vertex!r} lies outside the window")


class PreconditionError(CoarseGridError):
    """An operation's documented precondition does not hold."""

    exit_code = 1


class ConstructionError(CoarseGridError):
    """A finite construction failed inside the window.

    ``stage`` names the pipeline step and ``hint`` says what to enlarge;
    these failures are not refutations of anything.
    """

    exit_code = 1

    def __init__(self, message: str, stage: str = "", hint: str = "enlarge window"):
        self.stage = stage
        self.hint = hint
        prefix = f"[{stage}] " if stage else ""
        super().__init__(f"{prefix}{message} (hint: {hint})")


class InvalidModelError(CoarseGridError):
    """A minor model failed validation where a valid one was required."""

    exit_code = 2

    def __init__(self, report):
        self.report = report
        super().__init__(f"invalid model: {report.clause}: {report.detail}")
