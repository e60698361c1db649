"""Exception hierarchy shared by every layer of the toolkit."""

from __future__ import annotations


class PostulationError(Exception):
    """Base class for all errors raised by this package."""


class RangeError(PostulationError, ValueError):
    """Parameters fall outside the range where a formula applies."""


class GenericityError(PostulationError):
    """Random sampling failed to produce data in general position.

    Raised after the bounded number of resampling attempts is exhausted.
    Enlarging the prime usually helps.
    """


class ConstraintError(PostulationError, ValueError):
    """A component constraint cannot be satisfied in the declared context."""


class UnsupportedSplitError(PostulationError, ValueError):
    """A component/constraint pair has no residual/trace rule."""


class SpecFileError(PostulationError, ValueError):
    """A sweep specification file could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
