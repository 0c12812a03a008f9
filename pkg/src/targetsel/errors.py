"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: input/format problems -> 2,
configuration problems -> 3, numerical failures -> 4.
"""


class TargetselError(Exception):
    """Base class for all toolkit errors."""


class DataFormatError(TargetselError):
    """Malformed input file (ragged rows, bad tokens, range violations)."""


class EmptyInputError(DataFormatError):
    """Input file contains no rows."""


class ShapeError(TargetselError):
    """Incompatible array or kernel shapes."""


class SizeError(TargetselError):
    """A requested count exceeds what the input can provide."""


class ConfigurationError(TargetselError):
    """Inconsistent or incomplete run configuration."""


class DegenerateFeatureError(TargetselError):
    """A feature row that cannot be used under the chosen metric."""


class IndefiniteKernelError(TargetselError):
    """Cholesky failed on a log-det path; a larger ridge may help."""


class DivergenceError(TargetselError):
    """Training produced a non-finite loss."""
