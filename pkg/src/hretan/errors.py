"""Exception types shared across the package."""


class HreTanError(Exception):
    """Base class for all package-specific errors."""


class CycleError(HreTanError):
    """The feature hierarchy contains a directed cycle."""


class UnknownFeatureError(HreTanError):
    """An edge references a feature name that does not exist."""


class DuplicateFeatureError(HreTanError):
    """Feature names are not unique."""


class DimensionError(HreTanError):
    """Row/column counts do not line up with the expected feature universe."""


class ParseError(HreTanError):
    """Malformed input file; carries a 1-based line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ArgumentError(HreTanError):
    """An argument is outside its documented domain."""


class StructureError(HreTanError):
    """A tree refers to vertices that are not part of it."""


class EmptyTreeSignal(HreTanError):
    """No edge survived redundancy elimination; caller must fall back to the
    class prior."""


class LengthMismatchError(HreTanError):
    """Paired sequences have different lengths."""


class DegenerateError(HreTanError):
    """A statistic is undefined for the given data (e.g. zero variance)."""


class TooFewPairsError(HreTanError):
    """Not enough non-zero differences for the signed-rank test."""
