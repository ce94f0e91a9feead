"""Exception hierarchy.

Input-side problems derive from :class:`InputError`, numerical breakdowns
from :class:`NumericalError`; the CLI maps the two families to distinct
exit codes.
"""


class NLSSCError(Exception):
    """Base class for all package errors."""


class InputError(NLSSCError, ValueError):
    """Invalid data, parameters or files."""


class MalformedInputError(InputError):
    """A file could not be parsed."""


class DimensionError(InputError):
    """Shapes or lengths are inconsistent."""


class ParameterError(InputError):
    """A configuration value is outside its valid range."""


class InvalidFeatureError(InputError):
    """Features violate a kernel's domain (e.g. negative values for HIK)."""


class NumericalError(NLSSCError, ArithmeticError):
    """A numerical procedure could not proceed."""


class DegenerateKernelError(NumericalError):
    """Kernel bandwidth would be zero (all points coincide)."""


class SingularSystemError(NumericalError):
    """Sylvester pencil is (nearly) singular."""

    def __init__(self, message, min_gap=None):
        super().__init__(message)
        self.min_gap = min_gap


class DegeneratePointError(NumericalError):
    """A sample has non-positive self inner product."""


class InvariantViolationError(NumericalError):
    """An input violates a structural invariant (e.g. negative codes)."""
