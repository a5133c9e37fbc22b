"""Exception hierarchy.

Input problems derive from :class:`InputError` and numerical failures from
:class:`NumericalError`; the CLI maps these to exit codes 1 and 2.
"""


class HMMQError(Exception):
    """Base class for all package errors."""


class InputError(HMMQError, ValueError):
    pass


class NumericalError(HMMQError, ArithmeticError):
    pass


class RowSumError(InputError):
    """A state's outgoing probabilities do not sum to one."""


class ReducibilityError(InputError):
    """The transition graph is not strongly connected."""


class AlphabetError(InputError):
    """Unknown state or symbol, or a malformed transition entry."""


class DomainError(InputError):
    """Parameter outside its admissible range."""


class EncodingError(InputError):
    """Auxiliary encoding violates the per-transition orthonormality condition."""


class NotUnifilarError(InputError):
    pass


class ShapeError(InputError):
    pass


class ResourceError(InputError):
    """Requested computation exceeds the configured budget."""


class ConvergenceError(NumericalError):
    pass


class SpectrumError(NumericalError):
    """Matrix expected to be positive semidefinite has a negative eigenvalue."""


class ConsistencyError(NumericalError):
    pass


class TraceError(NumericalError):
    pass


class BoundViolationError(NumericalError):
    """Work cost below the information-processing lower bound."""
