"""Exception hierarchy shared by the whole package.

Every error raised on purpose derives from :class:`SoftGlcmError` so callers
(and the CLI) can separate our diagnostics from genuine bugs.
"""


class SoftGlcmError(Exception):
    """Base class for all errors raised by this package."""


class InputDomainError(SoftGlcmError):
    """An input value lies outside its documented domain."""


class FormatError(SoftGlcmError):
    """A file is recognizable but not in a supported format."""


class ImageIOError(SoftGlcmError):
    """A file could not be read completely (missing or truncated data)."""


class DimensionError(SoftGlcmError):
    """Image dimensions are incompatible with the requested patch layout."""


class GeometryError(SoftGlcmError):
    """A patch is too small to contain any pixel pair at the given offset."""


class CoverageError(SoftGlcmError):
    """A patch collection does not cover its grid exactly once."""


class ContractError(SoftGlcmError):
    """Arguments violate a documented precondition (shape or flag mismatch)."""


class DegenerateInputError(SoftGlcmError):
    """Input is valid in shape but carries no usable information."""


class DegenerateMaskError(SoftGlcmError):
    """A mask request would hide every patch or none of them."""


class NumericalFailureError(SoftGlcmError):
    """An optimization step produced a non-finite loss or gradient."""

    def __init__(self, message: str, step: int, components=None):
        super().__init__(message)
        self.step = step
        self.components = components
