"""Exception types shared across the toolkit."""


class DataError(ValueError):
    """Malformed or inconsistent input data (files, labels, shapes)."""


class TensorFormatError(DataError):
    """A tensor file violates the TNSR binary format."""


class ManifestError(DataError):
    """A dataset manifest line failed validation."""


class NumericError(RuntimeError):
    """Numeric failure: divergence or non-convergence of a solver."""
