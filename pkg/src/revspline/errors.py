"""Exception hierarchy.

Every error raised on purpose by the library derives from :class:`RevsplineError`
so callers (the CLI in particular) can map families of failures to exit codes.
"""

from __future__ import annotations


class RevsplineError(Exception):
    """Base class for all library errors."""


class InvalidGeometryError(RevsplineError, ValueError):
    """A radius, generatrix or cap is geometrically meaningless."""


class OutOfRangeError(RevsplineError, ValueError):
    """An axial coordinate lies outside the body's axis interval."""


class OutOfDomainError(RevsplineError, ValueError):
    """A point lies outside the solid (or too close to an interface)."""


class InsufficientSamplesError(RevsplineError, ValueError):
    """A least-squares fit is underdetermined."""


class ValidationError(RevsplineError, ValueError):
    """A problem definition violates a named rule.

    Parameters
    ----------
    rule : str
        Short kebab-case identifier of the violated rule, e.g. ``"cap-mismatch"``.
    message : str
        Human readable detail.
    """

    def __init__(self, rule: str, message: str):
        super().__init__(f"{rule}: {message}")
        self.rule = rule


class InvalidGridError(ValidationError):
    """Level list is not strictly increasing or not inside (A, B)."""


class SolverConfigError(RevsplineError):
    """The requested construction cannot be applied to this problem."""

    def __init__(self, kind: str, message: str):
        super().__init__(f"{kind}: {message}")
        self.kind = kind


class InvalidIntervalError(RevsplineError, ValueError):
    pass


class IncompatibleSolutionsError(RevsplineError, ValueError):
    pass


class SingularPointError(RevsplineError, ValueError):
    """Inversion requested at the inversion center."""


class NotRepresentableError(RevsplineError, ValueError):
    """The inverted body is not a graph over its axis."""


class ConfigError(RevsplineError):
    """Malformed configuration file (syntax or schema)."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column


class OutputError(RevsplineError):
    """An output file could not be written."""
