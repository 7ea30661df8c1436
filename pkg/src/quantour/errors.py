"""Semantic exception hierarchy.

The CLI maps these onto exit codes: data errors (bad input files, missing
columns) exit 3, computation errors (singular designs, size guards,
undefined distances, solver contract breaches) exit 4.
"""


class QuantourError(Exception):
    """Base class for all library errors."""


class InvalidParameterError(QuantourError, ValueError):
    """A parameter violates its domain (tau out of (0,1], negative lambda, ...)."""


class InvalidGridError(InvalidParameterError):
    """Direction grid with fewer than 3 directions."""


class ContractViolationError(QuantourError):
    """A documented precondition was violated (e.g. unsorted halfplanes)."""


class UndefinedDistanceError(QuantourError):
    """Hausdorff distance requested with an empty region."""


class SingularDesignError(QuantourError):
    """Regression design has no slope information (all abscissas equal)."""


class InsufficientDataError(QuantourError):
    """Too few (distinct) observations for the requested fit."""


class MissingCovariateError(QuantourError):
    """Conditional operation on a dataset without a covariate column."""


class SizeLimitError(QuantourError):
    """Input exceeds a hard size guard of an exact/oracle routine."""


class EmptyInputError(QuantourError):
    """An input file or sequence contained no data."""


class CSVParseError(QuantourError):
    """Malformed CSV row; carries the 1-based line number."""

    def __init__(self, line_number, message):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class InternalContractError(QuantourError):
    """An internal construction produced an infeasible/unbounded program."""


DATA_ERRORS = (EmptyInputError, CSVParseError, MissingCovariateError)
COMPUTATION_ERRORS = (
    SingularDesignError,
    InsufficientDataError,
    SizeLimitError,
    UndefinedDistanceError,
    ContractViolationError,
    InternalContractError,
    InvalidParameterError,
)
