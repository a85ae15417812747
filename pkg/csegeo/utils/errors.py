"""
Exception hierarchy for csegeo.

Library code raises these; the CLI maps UsageError to exit code 1 and
DataError (and its subclasses) to exit code 2.
"""

from typing import Optional


class CSEGeoError(Exception):
    """Base class for every error raised by csegeo."""


class UsageError(CSEGeoError):
    """Bad command-line usage (unknown subcommand, missing flag)."""


class DataError(CSEGeoError):
    """The inputs were well-formed requests but the data is unusable."""


class MeshFormatError(DataError):
    """
    A mesh file could not be parsed.

    Args:
        message: Description of the problem
        line: 1-based line number in the source file, if known
    """

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MeshValidationError(DataError):
    """A parsed mesh violates a structural invariant."""


class ParameterError(DataError):
    """A numeric parameter or config value is out of its valid range."""


class MismatchError(DataError):
    """Artifacts that must agree (hashes, dimensions, lengths) do not."""


class SpectralError(DataError):
    """The eigensolver failed to converge."""


class NumericalError(DataError):
    """A computation produced non-finite values."""


class ContainerError(DataError):
    """A CSEB container or its manifest is malformed."""
