"""Exception types shared across the package."""


class LvsError(Exception):
    """Base class for all errors raised by this package."""


class InputError(LvsError, ValueError):
    """Malformed or non-finite input data."""


class ParameterError(LvsError, ValueError):
    """A numeric parameter is outside its admissible range."""


class DegenerateInputError(LvsError, ValueError):
    """The input has no support (zero matrix, rank 0, empty state)."""


class PreconditionError(LvsError, ValueError):
    """A documented precondition of an operation does not hold."""


class ConstructionError(LvsError, RuntimeError):
    """A numerical construction could not be certified."""


class MatrixFormatError(InputError):
    """A matrix or vector file could not be parsed.

    Attributes
    ----------
    line : int or None
        1-based line number where parsing failed, when known.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
