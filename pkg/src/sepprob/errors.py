"""Exception classes shared across the package.

The CLI maps these onto stable exit codes: input problems exit with 2,
numerical failures with 3, and verification failures with 4.
"""


class SepprobError(Exception):
    """Base class for all package errors."""


class InputError(SepprobError):
    """Malformed or out-of-contract input (bad file, bad flag, bad domain)."""

    exit_code = 2


class InsufficientMomentsError(InputError):
    """Requested expansion degree exceeds the supplied moment count."""


class ParameterPoleError(InputError):
    """A lower hypergeometric parameter hits a nonpositive integer."""

    def __init__(self, parameter, message=None):
        self.parameter = parameter
        super().__init__(message or f"lower parameter {parameter} is a nonpositive integer")


class NumericalFailureError(SepprobError):
    """A numerical consistency check failed (residuals, imaginary parts, ...)."""

    exit_code = 3


class VerificationFailureError(SepprobError):
    """A verification run produced a FAIL verdict."""

    exit_code = 4
