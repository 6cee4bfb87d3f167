"""Exception hierarchy for phitaylor."""


class PhiError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(PhiError, ValueError):
    """Operand shapes are incompatible or a matrix is not square."""


class ParameterError(PhiError, ValueError):
    """An algorithm parameter is outside its admissible range."""


class DomainError(PhiError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class ScalingOverflowError(PhiError, OverflowError):
    """The selected scaling exponent exceeds the supported cap."""


class OracleScaleError(PhiError, ValueError):
    """Input is too large for the extended-precision reference oracle."""


class MatrixMarketError(PhiError, ValueError):
    """Malformed Matrix Market content.

    ``lineno`` is the 1-based line where parsing failed (``None`` when the
    problem is not tied to one line, e.g. a truncated body).
    """

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class FetchError(PhiError, RuntimeError):
    """A matrix could not be obtained from the network or the cache."""


class CatalogError(FetchError, KeyError):
    """Requested matrix name is not in the download catalog."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class IntegrityError(FetchError):
    """A downloaded or cached archive failed checksum verification."""


class ThetaSaturationWarning(UserWarning):
    """The backward-error bound stays below tolerance up to the search guard."""
