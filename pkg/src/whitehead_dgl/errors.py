"""Exception types shared across the package."""


class WhiteheadError(Exception):
    """Base class for all errors raised by this package."""


class InvalidComplex(WhiteheadError):
    """A claimed boundary is not a cycle, so d∘d is not zero somewhere upstream."""


class AlgebraMismatch(WhiteheadError):
    """Elements from different algebras were combined."""


class DegreeError(WhiteheadError):
    """An element or generator has the wrong or an inhomogeneous degree."""


class ValidationError(WhiteheadError):
    """A model, map or problem fails a structural check."""

    def __init__(self, message, violations=None, line=None):
        super().__init__(message)
        self.violations = list(violations or [])
        self.line = line


class ParseError(WhiteheadError):
    def __init__(self, message, line=None, column=None, expected=None):
        where = f"line {line}" if line is not None else "input"
        if column is not None:
            where += f", column {column}"
        super().__init__(f"{where}: {message}")
        self.line = line
        self.column = column
        self.expected = expected


class NotACycle(WhiteheadError):
    """An operation that needs a cycle received something else."""


class CapTooLow(WhiteheadError):
    """The requested computation needs data beyond the degree cap."""

    def __init__(self, message, needed=None, cap=None):
        super().__init__(message)
        self.needed = needed
        self.cap = cap


class QuasiIsoViolation(WhiteheadError):
    """A map assumed to be a surjective quasi-isomorphism is not one."""

    def __init__(self, message, degree=None):
        super().__init__(message)
        self.degree = degree
