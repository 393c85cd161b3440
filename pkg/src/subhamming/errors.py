"""Exception types shared across the package."""


class GroundSetMismatchError(ValueError):
    """Two objects built over different ground sets were combined."""


class PolymatroidValidationError(ValueError):
    """A function description fails the positive-polymatroid construction rules."""


class InfeasibleConstraintError(ValueError):
    """The requested constraint admits no subset of the ground set."""


class GroundSetTooLargeError(ValueError):
    """Exact enumeration was requested beyond the brute-force size cap."""


class ConvergenceError(RuntimeError):
    """An iterative solver hit its iteration cap before reaching tolerance."""


class InstanceParseError(ValueError):
    """A problem/corpus file could not be parsed or fails schema validation."""

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


class UnsupportedConstraintError(ValueError):
    """The solver's guarantee does not cover the requested constraint."""
