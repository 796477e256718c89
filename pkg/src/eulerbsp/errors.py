"""Exception hierarchy shared across the package.

Two failure families matter to callers: *validation* failures (the input
violates a stated precondition, e.g. a non-Eulerian graph) and *structural*
failures (internally inconsistent data, e.g. a remote arc without a mirror).
The CLI maps them to exit codes 2 and 3 respectively.
"""


class EulerBspError(Exception):
    """Base class for all package errors."""


class ValidationFailure(EulerBspError):
    """Input violates a documented precondition (CLI exit code 2)."""


class StructuralError(EulerBspError):
    """Internal structures are inconsistent or corrupted (CLI exit code 3)."""


class GraphFormatError(ValidationFailure):
    """A graph or partition file could not be parsed."""


class CoverageError(StructuralError):
    """The unrolled circuit did not consume every recorded entry."""

    def __init__(self, message: str, unconsumed: list[int]):
        super().__init__(message)
        self.unconsumed = unconsumed
