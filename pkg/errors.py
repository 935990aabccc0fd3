"""
Sentence Lab Errors

Exception hierarchy shared by all packages. Library code raises, the CLI maps
each class to its exit code.
"""

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_SIZE_CAP = 3
EXIT_NUMERICAL = 4


class SentenceLabError(Exception):
    """Base class for every error raised by the lab."""

    exit_code = 1


class ValidationError(SentenceLabError, ValueError):
    """Invalid input: bad arguments, name clashes, malformed formulas or specs."""

    exit_code = EXIT_VALIDATION


class SizeCapError(ValidationError):
    """A construction would exceed the configured size cap."""

    exit_code = EXIT_SIZE_CAP

    def __init__(self, what, required, cap):
        """
        Args:
            what: Description of the oversized object
            required: Size the construction needs
            cap: Current cap
        """
        self.what = what
        self.required = required
        self.cap = cap
        super().__init__(
            f"{what} needs size {required}, above the cap {cap}; "
            f"set TL_SIZE_CAP={required} to allow it"
        )


class NumericalError(SentenceLabError, ArithmeticError):
    """Numerical failure: lost structure, non-finite values, infeasible oracle."""

    exit_code = EXIT_NUMERICAL
